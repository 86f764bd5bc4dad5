#include "ftlab/census.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ftlab {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kKindKeys{"memory", "swap", "tgate", "readout"};

ExRecCensus row(Gadget g, AffineCount m, AffineCount s, std::optional<AffineCount> t, AffineCount r,
                AffineCount depth) {
    ExRecCensus c;
    c.gadget = g;
    c.counts[idx(LocationKind::Memory)] = m;
    c.counts[idx(LocationKind::Swap)] = s;
    c.counts[idx(LocationKind::TGate)] = t;
    c.counts[idx(LocationKind::Readout)] = r;
    c.depth = depth;
    return c;
}

std::string fmt_affine(const AffineCount& a) {
    std::ostringstream os;
    os.precision(12);
    os << a.base;
    if (a.slope != 0.0) os << (a.slope < 0 ? "" : "+") << a.slope << "*tr";
    return os.str();
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

bool near(const AffineCount& a, const AffineCount& b) {
    return near(a.base, b.base) && near(a.slope, b.slope);
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw CensusError("missing field " + where + "." + key);
    if (!it->is_number()) throw CensusError("field " + where + "." + key + " is not a number");
    return it->get<double>();
}

AffineCount parse_affine(const json& j, const std::string& where) {
    if (!j.is_object()) throw CensusError("field " + where + " must be an object");
    for (auto& [k, v] : j.items()) {
        if (k != "base" && k != "slope") throw CensusError("unknown key " + where + "." + k);
    }
    AffineCount a;
    a.base = get_number(j, "base", where);
    a.slope = j.contains("slope") ? get_number(j, "slope", where) : 0.0;
    if (!std::isfinite(a.base) || !std::isfinite(a.slope))
        throw CensusError("non-finite value in " + where);
    if (a.base < 0 || a.slope < 0) throw CensusError("negative count in " + where);
    return a;
}

ExRecCensus parse_row(const json& j, Gadget g, const std::string& where) {
    if (!j.is_object()) throw CensusError("field " + where + " must be an object");
    ExRecCensus c;
    c.gadget = g;
    for (auto& [k, v] : j.items()) {
        bool known = k == "depth";
        for (auto key : kKindKeys) known = known || k == key;
        if (!known) throw CensusError("unknown key " + where + "." + k);
    }
    for (auto kind : kLocationKinds) {
        std::string key(to_string(kind));
        if (j.contains(key)) {
            c.counts[idx(kind)] = parse_affine(j.at(key), where + "." + key);
        } else if (kind != LocationKind::TGate) {
            throw CensusError("missing field " + where + "." + key);
        }
    }
    if (!j.contains("depth")) throw CensusError("missing field " + where + ".depth");
    c.depth = parse_affine(j.at("depth"), where + ".depth");
    return c;
}

KindArray<ExRecCensus> parse_level(const json& j, const std::string& level) {
    if (!j.is_object()) throw CensusError("field " + level + " must be an object");
    for (auto& [k, v] : j.items()) {
        if (!parse_gadget(k)) throw CensusError("unknown key " + level + "." + k);
    }
    KindArray<ExRecCensus> out{};
    for (auto g : kGadgets) {
        std::string key(to_string(g));
        if (!j.contains(key)) throw CensusError("missing gadget " + level + "." + key);
        out[idx(g)] = parse_row(j.at(key), g, level + "." + key);
    }
    return out;
}

json affine_json(const AffineCount& a) { return json{{"base", a.base}, {"slope", a.slope}}; }

json level_json(const KindArray<ExRecCensus>& level) {
    json out = json::object();
    for (auto g : kGadgets) {
        const auto& c = level[idx(g)];
        json r = json::object();
        for (auto kind : kLocationKinds) {
            if (c.has(kind)) r[std::string(to_string(kind))] = affine_json(*c.counts[idx(kind)]);
        }
        r["depth"] = affine_json(c.depth);
        out[std::string(to_string(g))] = r;
    }
    return out;
}

}  // namespace

std::string_view to_string(LocationKind k) { return kKindKeys[idx(k)]; }

std::string_view to_string(Gadget g) { return kKindKeys[idx(g)]; }

std::optional<Gadget> parse_gadget(std::string_view s) {
    for (auto g : kGadgets) {
        if (to_string(g) == s) return g;
    }
    return std::nullopt;
}

double count_at(const ExRecCensus& c, LocationKind kind, double tr) {
    const auto& a = c.counts[idx(kind)];
    return a ? a->at(tr) : 0.0;
}

CensusSet paper_census() {
    CensusSet s;
    using G = Gadget;
    s.level1[idx(G::Memory)] = row(G::Memory, {654, 28}, {408, 0}, std::nullopt, {40, 0}, {41, 2});
    s.level1[idx(G::Swap)] = row(G::Swap, {1002, 56}, {1122, 0}, std::nullopt, {80, 0}, {41, 2});
    s.level1[idx(G::TGate)] = row(G::TGate, {3032, 133}, {1228, 0}, std::nullopt, {128, 0}, {205, 10});
    s.level1[idx(G::Readout)] = row(G::Readout, {1045, 42}, {510, 0}, std::nullopt, {57, 0}, {82, 4});

    s.leveln[idx(G::Memory)] = row(G::Memory, {558, 0}, {204, 0}, AffineCount{0, 0}, {28, 0}, {38, 0});
    s.leveln[idx(G::Swap)] = row(G::Swap, {824, 0}, {603, 0}, AffineCount{0, 0}, {56, 0}, {38, 0});
    s.leveln[idx(G::TGate)] = row(G::TGate, {2605, 0}, {619, 0}, AffineCount{28, 0}, {98, 0}, {190, 0});
    s.leveln[idx(G::Readout)] = row(G::Readout, {974, 0}, {255, 0}, AffineCount{0, 0}, {42, 0}, {76, 0});
    return s;
}

std::vector<CensusViolation> validate(const CensusSet& set) {
    std::vector<CensusViolation> out;
    auto check_level = [&](const KindArray<ExRecCensus>& level, const std::string& name, bool logical) {
        for (auto g : kGadgets) {
            const auto& c = level[idx(g)];
            if (c.gadget != g)
                out.push_back({name, g, "gadget tag", std::string(to_string(c.gadget)), std::string(to_string(g))});
            for (auto kind : kLocationKinds) {
                if (!c.has(kind)) continue;
                const auto& a = *c.counts[idx(kind)];
                if (a.base < 0 || a.slope < 0)
                    out.push_back({name, g, std::string("negative count ") + std::string(to_string(kind)),
                                   fmt_affine(a), ">= 0"});
                if (logical && a.slope != 0)
                    out.push_back({name, g, std::string("time-dependent ") + std::string(to_string(kind)),
                                   fmt_affine(a), "slope 0"});
            }
            if (c.depth.base < 0 || c.depth.slope < 0)
                out.push_back({name, g, "negative depth", fmt_affine(c.depth), ">= 0"});
            if (logical && c.depth.slope != 0)
                out.push_back({name, g, "time-dependent depth", fmt_affine(c.depth), "slope 0"});
            if (!logical && c.has(LocationKind::TGate))
                out.push_back({name, g, "tgate at physical level", fmt_affine(*c.counts[idx(LocationKind::TGate)]),
                               "absent"});
        }
        const auto& m = level[idx(Gadget::Memory)].depth;
        auto ratio = [&](Gadget g, double factor) {
            AffineCount want{factor * m.base, factor * m.slope};
            const auto& d = level[idx(g)].depth;
            if (!near(d, want)) {
                std::ostringstream rule;
                rule << "depth ratio " << factor << "x memory";
                out.push_back({name, g, rule.str(), fmt_affine(d), fmt_affine(want)});
            }
        };
        ratio(Gadget::Swap, 1.0);
        ratio(Gadget::TGate, 5.0);
        ratio(Gadget::Readout, 2.0);
        if (logical) {
            // Every full EC cycle measures two 7-qubit ancilla blocks.
            for (auto g : {Gadget::Memory, Gadget::Swap}) {
                double r = count_at(level[idx(g)], LocationKind::Readout, 0.0);
                double cycles = std::round(r / 14.0);
                if (std::abs(r - 14.0 * cycles) > 1e-9 || cycles < 1) {
                    std::ostringstream want;
                    want << "multiple of 14 (" << 14.0 * std::max(1.0, cycles) << ")";
                    std::ostringstream got;
                    got << r;
                    out.push_back({name, g, "readout count per EC cycle", got.str(), want.str()});
                }
            }
        }
    };
    check_level(set.level1, "level1", false);
    check_level(set.leveln, "leveln", true);
    return out;
}

std::string describe(const CensusViolation& v) {
    return v.level + "." + std::string(to_string(v.gadget)) + ": " + v.rule + " (observed " + v.observed +
           ", expected " + v.expected + ")";
}

CensusSet load_census(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw CensusError(std::string("malformed census document: ") + e.what());
    }
    if (!j.is_object()) throw CensusError("census document must be an object");
    for (auto& [k, v] : j.items()) {
        if (k != "level1" && k != "leveln") throw CensusError("unknown key " + k);
    }
    if (!j.contains("level1")) throw CensusError("missing field level1");
    if (!j.contains("leveln")) throw CensusError("missing field leveln");
    CensusSet s;
    s.level1 = parse_level(j.at("level1"), "level1");
    s.leveln = parse_level(j.at("leveln"), "leveln");
    return s;
}

CensusSet load_census_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CensusError("cannot open census file " + path);
    return load_census(f);
}

std::string census_to_json(const CensusSet& set) {
    json j{{"level1", level_json(set.level1)}, {"leveln", level_json(set.leveln)}};
    return j.dump(2) + "\n";
}

void save_census(const CensusSet& set, std::ostream& out) { out << census_to_json(set); }

}  // namespace ftlab
