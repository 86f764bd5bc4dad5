#include "ftlab/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace ftlab {

PauliOperator::PauliOperator(std::size_t n) : n_(n), x_((n + 63) / 64, 0), z_((n + 63) / 64, 0) {}

void PauliOperator::put(std::vector<std::uint64_t>& v, std::size_t q, bool b) {
    std::uint64_t m = std::uint64_t{1} << (q & 63);
    if (b) v[q >> 6] |= m;
    else v[q >> 6] &= ~m;
}

void PauliOperator::set(std::size_t q, bool x, bool z) {
    if (q >= n_) throw std::out_of_range("qubit index outside Pauli operator");
    // Keep the Hermitian part fixed: adding or removing a Y shifts the stored phase.
    int before = (this->x(q) && this->z(q)) ? 1 : 0;
    int after = (x && z) ? 1 : 0;
    put(x_, q, x);
    put(z_, q, z);
    set_phase(phase_ + after - before);
}

PauliOperator PauliOperator::single(std::size_t n, std::size_t q, char p) {
    PauliOperator out(n);
    switch (p) {
        case 'I': break;
        case 'X': out.set(q, true, false); break;
        case 'Z': out.set(q, false, true); break;
        case 'Y': out.set(q, true, true); break;
        default: throw std::invalid_argument("unknown Pauli letter");
    }
    return out;
}

PauliOperator PauliOperator::parse(std::string_view text) {
    int phase = 0;
    std::size_t i = 0;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        if (text[i] == '-') phase = 2;
        ++i;
    }
    if (i < text.size() && text[i] == 'i') {
        phase += 1;
        ++i;
    }
    PauliOperator out(text.size() - i);
    for (std::size_t q = 0; i < text.size(); ++i, ++q) {
        char c = text[i];
        if (c == '_') c = 'I';
        out = out * single(out.size(), q, c);
    }
    out.set_phase(out.phase() + phase);
    return out;
}

std::size_t PauliOperator::weight() const {
    std::size_t w = 0;
    for (std::size_t k = 0; k < x_.size(); ++k) w += static_cast<std::size_t>(std::popcount(x_[k] | z_[k]));
    return w;
}

bool PauliOperator::commutes(const PauliOperator& o) const {
    if (o.n_ != n_) throw std::invalid_argument("Pauli size mismatch");
    unsigned parity = 0;
    for (std::size_t k = 0; k < x_.size(); ++k)
        parity ^= static_cast<unsigned>(std::popcount((x_[k] & o.z_[k]) ^ (z_[k] & o.x_[k]))) & 1u;
    return parity == 0;
}

PauliOperator& PauliOperator::operator*=(const PauliOperator& o) {
    if (o.n_ != n_) throw std::invalid_argument("Pauli size mismatch");
    // X^a Z^b X^c Z^d = (-1)^{b.c} X^{a+c} Z^{b+d}
    int sign = 0;
    for (std::size_t k = 0; k < x_.size(); ++k) sign += std::popcount(z_[k] & o.x_[k]);
    set_phase(phase_ + o.phase_ + 2 * (sign & 1));
    for (std::size_t k = 0; k < x_.size(); ++k) {
        x_[k] ^= o.x_[k];
        z_[k] ^= o.z_[k];
    }
    return *this;
}

PauliOperator PauliOperator::operator*(const PauliOperator& o) const {
    PauliOperator r = *this;
    r *= o;
    return r;
}

void PauliOperator::apply_h(std::size_t q) {
    bool a = x(q), b = z(q);
    put(x_, q, b);
    put(z_, q, a);
    if (a && b) set_phase(phase_ + 2);
}

void PauliOperator::apply_s(std::size_t q) {
    bool a = x(q);
    if (!a) return;
    put(z_, q, !z(q));
    set_phase(phase_ + 1);
}

void PauliOperator::apply_sdg(std::size_t q) {
    bool a = x(q);
    if (!a) return;
    put(z_, q, !z(q));
    set_phase(phase_ + 3);
}

void PauliOperator::apply_x(std::size_t q) {
    if (z(q)) set_phase(phase_ + 2);
}

void PauliOperator::apply_z(std::size_t q) {
    if (x(q)) set_phase(phase_ + 2);
}

void PauliOperator::apply_cnot(std::size_t c, std::size_t t) {
    // X_c -> X_c X_t, Z_t -> Z_c Z_t; no reordering sign in this representation.
    if (x(c)) put(x_, t, !x(t));
    if (z(t)) put(z_, c, !z(c));
}

void PauliOperator::apply_swap(std::size_t a, std::size_t b) {
    bool xa = x(a), za = z(a);
    put(x_, a, x(b));
    put(z_, a, z(b));
    put(x_, b, xa);
    put(z_, b, za);
}

std::string PauliOperator::to_string() const {
    std::string body;
    int ys = 0;
    for (std::size_t q = 0; q < n_; ++q) {
        bool a = x(q), b = z(q);
        body += a ? (b ? 'Y' : 'X') : (b ? 'Z' : 'I');
        ys += (a && b) ? 1 : 0;
    }
    int p = ((phase_ - ys) % 4 + 4) % 4;
    static const char* prefix[] = {"+", "+i", "-", "-i"};
    return prefix[p] + body;
}

}  // namespace ftlab
