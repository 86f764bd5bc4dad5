#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ftlab/circuit.hpp"
#include "ftlab/pauli.hpp"

namespace ftlab {

class UnsupportedOperation : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Aaronson-Gottesman tableau: n destabilizers followed by n stabilizers.
class StabilizerTableau {
   public:
    explicit StabilizerTableau(std::size_t n);  // |0...0>

    std::size_t num_qubits() const { return n_; }
    const PauliOperator& stabilizer(std::size_t i) const { return rows_[n_ + i]; }
    const PauliOperator& destabilizer(std::size_t i) const { return rows_[i]; }

    void h(std::size_t q);
    void s(std::size_t q);
    void sdg(std::size_t q);
    void x(std::size_t q);
    void z(std::size_t q);
    void cnot(std::size_t c, std::size_t t);
    void swap(std::size_t a, std::size_t b);

    struct Measurement {
        bool outcome = false;
        bool random = false;
    };
    // A random outcome takes the value `choice`.
    Measurement measure_z(std::size_t q, bool choice = false);
    void reset(std::size_t q);

    // +1 or -1 when the Hermitian operator is (minus) a stabilizer, 0 when its value is random.
    int expectation(const PauliOperator& p) const;
    bool operator==(const StabilizerTableau& o) const { return n_ == o.n_ && rows_ == o.rows_; }

   private:
    std::size_t n_;
    std::vector<PauliOperator> rows_;
};

struct SimulationResult {
    StabilizerTableau state;
    std::vector<std::uint8_t> outcomes;  // by record id
    std::vector<std::uint8_t> random;    // by record id
};

// Qubit index of a site is Circuit::index(site). The k-th random measurement
// takes forced[k] (default 0, the +1 eigenvalue).
SimulationResult simulate_stabilizer(const Circuit& c, const StabilizerTableau& input,
                                     const std::vector<std::uint8_t>& forced = {});

// Applies one operation to a tableau; qubit_of maps its sites to tableau indices.
void apply_operation(StabilizerTableau& t, const Operation& op, const std::vector<std::size_t>& qubits,
                     std::vector<std::uint8_t>& outcomes, std::vector<std::uint8_t>& random,
                     const std::vector<std::uint8_t>& forced, std::size_t& random_count);

}  // namespace ftlab
