#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ftlab {

enum class LocationKind { Memory = 0, Swap = 1, TGate = 2, Readout = 3 };
enum class Gadget { Memory = 0, Swap = 1, TGate = 2, Readout = 3 };

inline constexpr std::array<LocationKind, 4> kLocationKinds{
    LocationKind::Memory, LocationKind::Swap, LocationKind::TGate, LocationKind::Readout};
inline constexpr std::array<Gadget, 4> kGadgets{Gadget::Memory, Gadget::Swap, Gadget::TGate,
                                                Gadget::Readout};

// Lower-case keys used by the file format and the CLI.
std::string_view to_string(LocationKind k);
std::string_view to_string(Gadget g);
std::optional<Gadget> parse_gadget(std::string_view s);

constexpr std::size_t idx(LocationKind k) { return static_cast<std::size_t>(k); }
constexpr std::size_t idx(Gadget g) { return static_cast<std::size_t>(g); }

// Dense map keyed by one of the four-valued enums above.
template <class T>
using KindArray = std::array<T, 4>;

struct AffineCount {
    double base = 0.0;
    double slope = 0.0;  // per unit t_r

    double at(double tr) const { return base + slope * tr; }
    bool operator==(const AffineCount&) const = default;
};

struct ExRecCensus {
    Gadget gadget = Gadget::Memory;
    KindArray<std::optional<AffineCount>> counts{};
    AffineCount depth{};

    bool has(LocationKind k) const { return counts[idx(k)].has_value(); }
    bool operator==(const ExRecCensus&) const = default;
};

// base + slope*t_r, or 0 when the kind is absent.
double count_at(const ExRecCensus& c, LocationKind kind, double tr);

struct CensusSet {
    KindArray<ExRecCensus> level1{};
    KindArray<ExRecCensus> leveln{};

    const ExRecCensus& l1(Gadget g) const { return level1[idx(g)]; }
    const ExRecCensus& ln(Gadget g) const { return leveln[idx(g)]; }
    bool operator==(const CensusSet&) const = default;
};

CensusSet paper_census();

struct CensusViolation {
    std::string level;  // "level1" or "leveln"
    Gadget gadget;
    std::string rule;
    std::string observed;
    std::string expected;
};

std::vector<CensusViolation> validate(const CensusSet& set);
std::string describe(const CensusViolation& v);

class CensusError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// JSON file format; throws CensusError naming the offending field.
CensusSet load_census(std::istream& in);
CensusSet load_census_file(const std::string& path);
void save_census(const CensusSet& set, std::ostream& out);
std::string census_to_json(const CensusSet& set);

}  // namespace ftlab
