#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ftlab/builders.hpp"
#include "ftlab/census.hpp"
#include "ftlab/exrec.hpp"
#include "ftlab/threshold_solver.hpp"
#include "ftlab/verifier.hpp"

namespace ftlab::cli {
namespace {

using json = nlohmann::ordered_json;

// Thrown by command bodies; carries the exit code.
struct Exit {
    int code;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sig3(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Writes to --out when given, else to the command's stream.
class Sink {
   public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
        os_ = &file_;
    }
    std::ostream& operator*() { return *os_; }

   private:
    std::ofstream file_;
    std::ostream* os_;
};

struct Context {
    std::ostream& out;
    std::ostream& err;
};

CensusSet census_from(const std::string& flag, Context& ctx) {
    std::string path = flag;
    if (path.empty())
        if (const char* env = std::getenv("FTLAB_CENSUS")) path = env;
    if (path.empty()) return paper_census();
    CensusSet set;
    try {
        set = load_census_file(path);
    } catch (const CensusError& e) {
        ctx.err << "census: " << e.what() << "\n";
        throw Exit{kUsage};
    }
    auto bad = validate(set);
    if (!bad.empty()) {
        for (const auto& v : bad) ctx.err << describe(v) << "\n";
        throw Exit{kCensusInvalid};
    }
    return set;
}

struct RatioFlags {
    Ratios r;
    void add(CLI::App* app) {
        app->add_option("--rm", r.Rm, "memory failure ratio p0m/p0S")->check(CLI::NonNegativeNumber);
        app->add_option("--rr", r.Rr, "readout failure ratio p0r/p0S")->check(CLI::NonNegativeNumber);
        app->add_option("--tr", r.tr, "readout time over gate time")->check(CLI::NonNegativeNumber);
    }
};

json result_json(const ThresholdResult& t) {
    return {{"level", t.level},   {"Rm", t.ratios.Rm},       {"Rr", t.ratios.Rr},
            {"tr", t.ratios.tr},  {"threshold", t.threshold}, {"iterations", t.iterations},
            {"residual", t.residual}, {"p1T", t.p1T},        {"multiple_roots", t.multiple_roots}};
}

// ---- threshold ----

struct ThresholdCmd {
    RatioFlags ratios;
    int level = 0;
    std::string census, format = "csv", out_path;

    void add(CLI::App& root, std::function<void()>& action, Context& ctx) {
        auto* c = root.add_subcommand("threshold", "level-n pseudothreshold");
        ratios.add(c);
        c->add_option("--level", level, "concatenation level (100 approximates the asymptote)")
            ->required()
            ->check(CLI::Range(2, 100000));
        c->add_option("--census", census, "census file (default: $FTLAB_CENSUS, else built-in)");
        c->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
        c->add_option("--out", out_path);
        c->callback([this, &action, &ctx] { action = [this, &ctx] { run(ctx); }; });
    }

    void run(Context& ctx) {
        auto set = census_from(census, ctx);
        ThresholdResult t;
        try {
            t = level_threshold(ratios.r, level, set);
        } catch (const NoThresholdError& e) {
            ctx.err << "threshold: " << e.what() << "\n";
            throw Exit{kNoRoot};
        }
        Sink sink(out_path, ctx.out);
        if (format == "json") {
            *sink << result_json(t).dump(2) << "\n";
        } else {
            *sink << "level,Rm,Rr,tr,threshold,iterations,residual,p1T\n"
                  << t.level << "," << num(t.ratios.Rm) << "," << num(t.ratios.Rr) << "," << num(t.ratios.tr) << ","
                  << num(t.threshold) << "," << t.iterations << "," << num(t.residual) << "," << num(t.p1T) << "\n";
        }
        ctx.err << "threshold(n=" << level << ") ~ " << sig3(t.threshold) << "\n";
        if (t.multiple_roots) ctx.err << "warning: more than one sign change in the search interval\n";
    }
};

// ---- curve ----

struct CurveCmd {
    RatioFlags ratios;
    std::vector<int> levels{1, 2, 3, 4, 5, 100};
    double pmin = 1e-7, pmax = 1e-5;
    int points = 41;
    std::string census, format = "csv", out_path;

    void add(CLI::App& root, std::function<void()>& action, Context& ctx) {
        auto* c = root.add_subcommand("curve", "T exRec failure against p0S for several levels");
        ratios.add(c);
        c->add_option("--levels", levels)->delimiter(',')->check(CLI::PositiveNumber);
        c->add_option("--pmin", pmin);
        c->add_option("--pmax", pmax);
        c->add_option("--points", points);
        c->add_option("--census", census);
        c->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
        c->add_option("--out", out_path);
        c->callback([this, &action, &ctx] { action = [this, &ctx] { run(ctx); }; });
    }

    void run(Context& ctx) {
        if (!(pmin > 0.0) || !(pmax > pmin) || pmax > 1.0 || points < 2 || levels.empty()) {
            ctx.err << "curve: need 0 < pmin < pmax <= 1, points >= 2 and at least one level\n";
            throw Exit{kUsage};
        }
        auto set = census_from(census, ctx);
        CurveTable table;
        try {
            table = failure_curve(ratios.r, levels, log_grid(pmin, pmax, points), set);
        } catch (const DomainError& e) {
            ctx.err << "curve: " << e.what() << "\n";
            throw Exit{kUsage};
        }
        Sink sink(out_path, ctx.out);
        if (format == "json") {
            json rows = json::array();
            for (const auto& r : table.rows) rows.push_back({{"p0S", r.p0S}, {"pT", r.pT}});
            *sink << json{{"levels", levels}, {"rows", rows}}.dump(2) << "\n";
            return;
        }
        *sink << "p0S";
        for (int n : levels) *sink << ",p" << n << "T";
        *sink << "\n";
        for (const auto& r : table.rows) {
            *sink << num(r.p0S);
            for (double v : r.pT) *sink << "," << num(v);
            *sink << "\n";
        }
    }
};

// ---- sweep ----

struct SweepCmd {
    RatioFlags ratios;
    std::string vary;
    std::optional<double> from, to;
    int points = 25, level = 100;
    unsigned threads = 0;
    std::string census, format = "csv", out_path;

    void add(CLI::App& root, std::function<void()>& action, Context& ctx) {
        auto* c = root.add_subcommand("sweep", "threshold along one physical-setting parameter");
        ratios.add(c);
        c->add_option("--vary", vary)->required()->check(CLI::IsMember({"rm", "rr", "tr"}));
        c->add_option("--from", from);
        c->add_option("--to", to);
        c->add_option("--points", points);
        c->add_option("--level", level)->check(CLI::Range(2, 100000));
        c->add_option("--threads", threads);
        c->add_option("--census", census);
        c->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
        c->add_option("--out", out_path);
        c->callback([this, &action, &ctx] { action = [this, &ctx] { run(ctx); }; });
    }

    void run(Context& ctx) {
        auto param = *parse_sweep_param(vary);
        SweepRange range = default_range(param);
        if (from) range.lo = *from;
        if (to) range.hi = *to;
        if (!(range.lo > 0.0) || !(range.hi > range.lo) || points < 2) {
            ctx.err << "sweep: need 0 < from < to and points >= 2\n";
            throw Exit{kUsage};
        }
        auto set = census_from(census, ctx);
        SweepTable table = sweep(param, range, points, ratios.r, level, set, {}, threads);
        bool missing = false;
        Sink sink(out_path, ctx.out);
        if (format == "json") {
            json rows = json::array();
            for (const auto& r : table.rows) {
                json row{{"value", r.value}};
                if (r.result) row["result"] = result_json(*r.result);
                else row["error"] = r.error;
                rows.push_back(row);
                missing |= !r.result;
            }
            *sink << json{{"vary", vary}, {"level", level}, {"rows", rows}}.dump(2) << "\n";
        } else {
            *sink << vary << ",threshold,iterations,residual\n";
            for (const auto& r : table.rows) {
                *sink << num(r.value) << ",";
                if (r.result) *sink << num(r.result->threshold) << "," << r.result->iterations << "," << num(r.result->residual);
                else *sink << ",,";
                *sink << "\n";
                missing |= !r.result;
            }
        }
        for (const auto& r : table.rows)
            if (!r.result) ctx.err << "sweep: " << vary << "=" << num(r.value) << ": " << r.error << "\n";
        if (missing) throw Exit{kNoRoot};
    }
};

// ---- census ----

struct CensusCmd {
    std::string out_path, file, gadget, level = "n", format = "csv";
    double tr = 10.0;
    CLI::App* print = nullptr;
    CLI::App* check = nullptr;
    CLI::App* extract = nullptr;

    void add(CLI::App& root, std::function<void()>& action, Context& ctx) {
        auto* c = root.add_subcommand("census", "location counts per exRec");
        c->require_subcommand(1);
        print = c->add_subcommand("print", "built-in table as JSON");
        print->add_option("--out", out_path);
        print->callback([this, &action, &ctx] { action = [this, &ctx] { run_print(ctx); }; });

        check = c->add_subcommand("validate", "check a census file");
        check->add_option("file", file)->required();
        check->callback([this, &action, &ctx] { action = [this, &ctx] { run_validate(ctx); }; });

        extract = c->add_subcommand("extract", "count locations in a built exRec");
        extract->add_option("--gadget", gadget)->required()->check(CLI::IsMember({"memory", "swap", "readout", "t"}));
        extract->add_option("--level", level)->check(CLI::IsMember({"n", "1"}));
        extract->add_option("--tr", tr, "t_r used for level-1 deltas")->check(CLI::NonNegativeNumber);
        extract->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
        extract->add_option("--out", out_path);
        extract->callback([this, &action, &ctx] { action = [this, &ctx] { run_extract(ctx); }; });
    }

    void run_print(Context& ctx) {
        Sink sink(out_path, ctx.out);
        *sink << census_to_json(paper_census()) << "\n";
    }

    void run_validate(Context& ctx) {
        CensusSet set;
        try {
            set = load_census_file(file);
        } catch (const CensusError& e) {
            ctx.err << "census: " << e.what() << "\n";
            throw Exit{kUsage};
        }
        auto bad = validate(set);
        for (const auto& v : bad) ctx.out << describe(v) << "\n";
        if (!bad.empty()) throw Exit{kCensusInvalid};
        ctx.out << "ok\n";
    }

    void run_extract(Context& ctx) {
        ExRecKind kind = gadget == "memory" ? ExRecKind::Memory
                         : gadget == "swap"  ? ExRecKind::Swap
                         : gadget == "readout" ? ExRecKind::Readout
                                               : ExRecKind::TSkeleton;
        bool lvl1 = level == "1";
        CensusSet built = extracted_census();
        CensusSet table = paper_census();
        Gadget g = gadget_of(kind);
        const ExRecCensus& mine = lvl1 ? built.l1(g) : built.ln(g);
        const ExRecCensus& ref = lvl1 ? table.l1(g) : table.ln(g);

        struct Row {
            std::string key;
            AffineCount got, want;
        };
        std::vector<Row> rows;
        for (auto k : kLocationKinds) {
            if (!mine.has(k) && !ref.has(k)) continue;
            rows.push_back({std::string(to_string(k)), mine.counts[idx(k)].value_or(AffineCount{}),
                            ref.counts[idx(k)].value_or(AffineCount{})});
        }
        rows.push_back({"depth", mine.depth, ref.depth});
        auto delta = [&](const Row& r) {
            double w = r.want.at(tr);
            return w == 0.0 ? (r.got.at(tr) == 0.0 ? 0.0 : INFINITY) : 100.0 * (r.got.at(tr) - w) / w;
        };

        Sink sink(out_path, ctx.out);
        if (format == "json") {
            json j{{"gadget", gadget}, {"level", level}, {"tr", tr}};
            for (const auto& r : rows)
                j["rows"].push_back({{"kind", r.key},
                                     {"extracted", {{"base", r.got.base}, {"slope", r.got.slope}}},
                                     {"table", {{"base", r.want.base}, {"slope", r.want.slope}}},
                                     {"delta_percent", delta(r)}});
            *sink << j.dump(2) << "\n";
            return;
        }
        *sink << "kind,extracted_base,extracted_slope,table_base,table_slope,delta_percent\n";
        for (const auto& r : rows) {
            char d[32];
            std::snprintf(d, sizeof d, "%.1f", delta(r));
            *sink << r.key << "," << num(r.got.base) << "," << num(r.got.slope) << "," << num(r.want.base) << ","
                  << num(r.want.slope) << "," << d << "\n";
        }
    }
};

// ---- verify ----

FaultReport merge(FaultReport a, const FaultReport& b) {
    a.faults += b.faults;
    a.max_weight = std::max(a.max_weight, b.max_weight);
    a.records.insert(a.records.end(), b.records.begin(), b.records.end());
    a.failures.insert(a.failures.end(), b.failures.begin(), b.failures.end());
    a.inconsistencies.insert(a.inconsistencies.end(), b.inconsistencies.begin(), b.inconsistencies.end());
    a.notes.insert(a.notes.end(), b.notes.begin(), b.notes.end());
    return a;
}

const std::map<std::string, std::function<FaultReport(FaultOptions)>>& components() {
    static const std::map<std::string, std::function<FaultReport(FaultOptions)>> m{
        {"swap-routine", [](FaultOptions o) { return verify_single_fault_tolerance(build_single_error_swap_demo(), o); }},
        {"naive-swap", [](FaultOptions o) { return verify_single_fault_tolerance(build_naive_swap(), o); }},
        {"mesh",
         [](FaultOptions o) { return verify_single_fault_tolerance(build_mesh(7, CircuitLevel::Physical), o); }},
        {"encode-decode",
         [](FaultOptions o) {
             FaultReport r;
             for (auto k : {ExtractionKind::X, ExtractionKind::Z}) {
                 auto g = lower_to_physical(build_syndrome_extraction(k));
                 auto table = build_recovery_table(g, o);
                 auto part = verify_single_fault_tolerance(g, o);
                 part.notes.push_back(std::string(k == ExtractionKind::X ? "X" : "Z") + " stage table: " +
                                      std::to_string(table.entries.size()) + " patterns from " +
                                      std::to_string(table.cases) + " cases");
                 part.inconsistencies = table.inconsistencies;
                 r = merge(std::move(r), part);
             }
             return r;
         }},
        {"memory-exrec",
         [](FaultOptions o) {
             return verify_single_fault_tolerance(assemble_exrec(ExRecKind::Memory, CircuitLevel::Physical), o);
         }},
        {"swap-exrec",
         [](FaultOptions o) {
             return verify_single_fault_tolerance(assemble_exrec(ExRecKind::Swap, CircuitLevel::Physical), o);
         }},
        {"readout-exrec",
         [](FaultOptions o) {
             return verify_single_fault_tolerance(assemble_exrec(ExRecKind::Readout, CircuitLevel::Physical), o);
         }},
    };
    return m;
}

struct VerifyCmd {
    std::string component, report;
    bool no_idle = false;

    void add(CLI::App& root, std::function<void()>& action, Context& ctx) {
        auto* c = root.add_subcommand("verify", "exhaustive single-fault check");
        std::vector<std::string> names;
        for (const auto& [k, v] : components()) names.push_back(k);
        c->add_option("--component", component)->required()->check(CLI::IsMember(names));
        c->add_option("--report", report, "write the JSON report here");
        c->add_flag("--no-idle", no_idle, "skip faults on idle computational qubits");
        c->callback([this, &action, &ctx] { action = [this, &ctx] { run(ctx); }; });
    }

    void run(Context& ctx) {
        FaultReport r = components().at(component)(FaultOptions{!no_idle});
        r.component = component;
        if (!report.empty()) {
            Sink sink(report, ctx.out);
            *sink << report_to_json(r) << "\n";
        }
        ctx.out << component << ": " << r.faults << " faults, max residual weight " << r.max_weight << ", "
                << r.failures.size() << " failing, " << r.inconsistencies.size() << " table conflicts: "
                << (r.passed() ? "PASS" : "FAIL") << "\n";
        for (const auto& n : r.notes) ctx.out << "  note: " << n << "\n";
        std::size_t shown = 0;
        for (const auto& f : r.failures) {
            if (++shown > 10) break;
            ctx.out << "  " << f.fault << " -> " << (f.block.empty() ? "-" : f.block) << " weight " << f.weight << " ("
                    << f.reason << ")\n";
        }
        for (const auto& i : r.inconsistencies) {
            if (++shown > 20) break;
            ctx.out << "  pattern " << i.pattern << ": " << i.first << " vs " << i.second << "\n";
        }
        if (!r.passed()) throw Exit{kVerifyFailed};
    }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Context ctx{out, err};
    CLI::App app{"Threshold, census and fault-tolerance tools for concatenated 7-qubit code circuits"};
    app.name("ftlab");
    app.require_subcommand(1);
    std::function<void()> action;
    ThresholdCmd threshold;
    CurveCmd curve;
    SweepCmd sweep_cmd;
    CensusCmd census;
    VerifyCmd verify;
    threshold.add(app, action, ctx);
    curve.add(app, action, ctx);
    sweep_cmd.add(app, action, ctx);
    census.add(app, action, ctx);
    verify.add(app, action, ctx);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    try {
        if (action) action();
    } catch (const Exit& e) {
        return e.code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kOk;
}

}  // namespace ftlab::cli
