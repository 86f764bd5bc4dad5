#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ftlab {

// i^phase * prod_j X_j^{x_j} Z_j^{z_j}; Y is stored as x=z=1 with an extra i.
class PauliOperator {
   public:
    PauliOperator() = default;
    explicit PauliOperator(std::size_t n);
    static PauliOperator parse(std::string_view text);  // "+XIZY", "-iZZ"
    static PauliOperator single(std::size_t n, std::size_t q, char p);

    std::size_t size() const { return n_; }
    bool x(std::size_t q) const { return bit(x_, q); }
    bool z(std::size_t q) const { return bit(z_, q); }
    void set(std::size_t q, bool x, bool z);
    int phase() const { return phase_; }  // exponent of i, 0..3
    void set_phase(int p) { phase_ = ((p % 4) + 4) % 4; }

    std::size_t weight() const;
    bool is_identity() const { return weight() == 0; }
    bool commutes(const PauliOperator& o) const;
    bool same_up_to_phase(const PauliOperator& o) const { return x_ == o.x_ && z_ == o.z_ && n_ == o.n_; }

    PauliOperator operator*(const PauliOperator& o) const;
    PauliOperator& operator*=(const PauliOperator& o);
    bool operator==(const PauliOperator& o) const = default;

    // Conjugation P -> U P U^dagger by Clifford generators.
    void apply_h(std::size_t q);
    void apply_s(std::size_t q);
    void apply_sdg(std::size_t q);
    void apply_x(std::size_t q);
    void apply_z(std::size_t q);
    void apply_cnot(std::size_t c, std::size_t t);
    void apply_swap(std::size_t a, std::size_t b);

    std::string to_string() const;

   private:
    static bool bit(const std::vector<std::uint64_t>& v, std::size_t q) { return (v[q >> 6] >> (q & 63)) & 1u; }
    static void put(std::vector<std::uint64_t>& v, std::size_t q, bool b);

    std::size_t n_ = 0;
    std::vector<std::uint64_t> x_;
    std::vector<std::uint64_t> z_;
    int phase_ = 0;
};

}  // namespace ftlab
