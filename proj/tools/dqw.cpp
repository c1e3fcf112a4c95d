#include "dqw/gluing.hpp"
#include "dqw/parse.hpp"
#include "dqw/random.hpp"
#include "dqw/star.hpp"
#include "dqw/states.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace dqw;
using json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    int d = 2;
    std::string alpha;
    std::string f, g;
    int order = 2;
    std::uint64_t seed = 1;
    std::string format = "text";
    bool timing = false;
};

Rational rational_of(const json& v) {
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
    throw UsageError("alpha entries must be integers or \"p/q\" strings");
}

PoissonTensor load_alpha(const Config& c) {
    if (c.alpha.empty()) return PoissonTensor::standard(c.d);
    std::string text = c.alpha;
    if (text.front() == '@') {
        std::ifstream in(text.substr(1));
        if (!in) throw UsageError("cannot read " + text.substr(1));
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    json m = json::parse(text, nullptr, false);
    if (m.is_discarded() || !m.is_array() || static_cast<int>(m.size()) != c.d)
        throw UsageError("alpha must be a " + std::to_string(c.d) + "x" + std::to_string(c.d) + " matrix");
    std::vector<std::vector<Rational>> rows;
    for (const auto& row : m) {
        if (!row.is_array() || static_cast<int>(row.size()) != c.d) throw UsageError("alpha rows must have length d");
        std::vector<Rational> r;
        for (const auto& v : row) r.push_back(rational_of(v));
        rows.push_back(r);
    }
    for (int i = 0; i < c.d; ++i)
        for (int j = 0; j < c.d; ++j)
            if (rows[i][j] != -rows[j][i]) throw UsageError("alpha is not antisymmetric");
    return PoissonTensor(c.d, rows);
}

std::vector<Rational> parse_point(const std::string& s, int d) {
    std::vector<Rational> x;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) x.push_back(parse_rational(item));
    if (static_cast<int>(x.size()) != d) throw UsageError("point must have " + std::to_string(d) + " coordinates");
    return x;
}

std::vector<std::string> split_points(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::string point_str(const std::vector<Rational>& x) {
    std::string s = "[";
    for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + rational_str(x[i]);
    return s + "]";
}

struct Outcome {
    bool ok = true;
    json result;                      // structured payload
    std::vector<std::string> lines;   // text payload
    std::vector<std::string> residual;
};

json inputs_of(const Config& c, const PoissonTensor& a) {
    return {{"d", c.d}, {"alpha", a.str()}, {"f", c.f}, {"g", c.g}, {"order", c.order}, {"seed", c.seed}};
}

int emit(const std::string& command, const json& inputs, const Outcome& o, const Config& c, double ms) {
    if (c.format == "json") {
        json r;
        r["command"] = command;
        r["inputs"] = inputs;
        r["status"] = o.ok ? "ok" : "failed";
        if (o.ok)
            r["result"] = o.result;
        else
            r["residual_terms"] = o.residual;
        if (c.timing) r["timing_ms"] = ms;
        std::cout << r.dump(2) << "\n";
    } else {
        std::cout << command << ": " << (o.ok ? "ok" : "FAILED") << "\n";
        for (const auto& l : o.lines) std::cout << l << "\n";
        if (!o.ok)
            for (const auto& l : o.residual) std::cout << "  " << l << "\n";
        if (c.timing) std::cout << "time: " << ms << " ms\n";
    }
    return o.ok ? 0 : 1;
}

Outcome report_outcome(const Report& r) {
    Outcome o;
    o.ok = r.verified && r.mutations_detected();
    o.residual = r.residual;
    json muts = json::array();
    for (const auto& m : r.mutations) {
        muts.push_back({{"name", m.name}, {"detected", m.detected}, {"residual_terms", m.residual_terms}});
        if (!m.detected) o.residual.push_back("undetected mutation " + m.name);
    }
    o.result = {{"residual_terms", r.residual.size()},
                {"mutations", muts},
                {"local_steps", r.stats.local_steps},
                {"relations", r.stats.relations}};
    if (!r.notes.empty()) o.result["notes"] = r.notes;
    o.lines.push_back("residual terms: " + std::to_string(r.residual.size()));
    std::size_t caught = 0;
    for (const auto& m : r.mutations) caught += m.detected;
    if (!r.mutations.empty())
        o.lines.push_back("mutations detected: " + std::to_string(caught) + "/" + std::to_string(r.mutations.size()));
    for (const auto& n : r.notes) o.lines.push_back("note: " + n);
    return o;
}

Outcome run_flatness(const Config& c, int count) {
    RandomSource rs(c.seed);
    Outcome o;
    int flat = 0, squares = 0;
    for (int k = 0; k < count; ++k) {
        int d = rs.uniform(1, 4);
        Poly f = rs.poly_x(d, c.order, 4, 5);
        Section s = grothendieck_flat_check(f);
        if (s.is_zero())
            ++flat;
        else
            o.residual.push_back("not flat: " + f.str() + " -> " + s.str());
        Section r;
        r.dim = d;
        r.order = c.order;
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            Poly p = rs.poly_x(d, c.order, 3, 3) * rs.poly_x(d, c.order, 2, 2).rename_block(Var::X, Var::Z);
            if (!p.is_zero()) r.parts.emplace(mask, p);
        }
        Section sq = grothendieck_apply(grothendieck_apply(r));
        if (sq.is_zero())
            ++squares;
        else
            o.residual.push_back("D_G^2 != 0: " + sq.str());
    }
    o.ok = o.residual.empty();
    o.result = {{"flat", flat}, {"square_zero", squares}, {"count", count}};
    o.lines.push_back("flat sections: " + std::to_string(flat) + "/" + std::to_string(count));
    o.lines.push_back("D_G^2 = 0: " + std::to_string(squares) + "/" + std::to_string(count));
    return o;
}

Outcome run_assoc(const Config& c, const PoissonTensor& a, int count, int max_deg) {
    RandomSource rs(c.seed);
    std::vector<PolyTriple> jobs;
    for (int k = 0; k < count; ++k)
        jobs.push_back({rs.poly_x(c.d, c.order, max_deg, 4), rs.poly_x(c.d, c.order, max_deg, 4),
                        rs.poly_x(c.d, c.order, max_deg, 4)});
    std::vector<Poly> res = associativity_batch(jobs, a, c.order, Exec::Parallel);
    Outcome o;
    int zero = 0;
    for (std::size_t k = 0; k < res.size(); ++k) {
        if (res[k].is_zero())
            ++zero;
        else
            o.residual.push_back("triple " + std::to_string(k) + ": " + res[k].str());
    }
    o.ok = o.residual.empty();
    o.result = {{"triples", count}, {"associative", zero}};
    o.lines.push_back("associative: " + std::to_string(zero) + "/" + std::to_string(count));
    return o;
}

Outcome run_glue(const Config& c, const PoissonTensor& a, const std::vector<std::string>& points) {
    Poly f = parse_poly(c.f, c.d, c.order), g = parse_poly(c.g, c.d, c.order);
    std::vector<GlueJob> jobs;
    for (const auto& p : points) jobs.push_back({f, g, parse_point(p, c.d)});
    if (jobs.empty()) jobs.push_back({f, g, std::vector<Rational>(c.d, Rational(0))});
    std::vector<Poly> got = gluing_batch(jobs, a, c.order);
    Poly star = moyal_product(f, g, a, c.order);
    Outcome o;
    json vals = json::array();
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const auto& x = jobs[k].point;
        Poly want = star.evaluate_block(Var::X, std::vector<Gauss>(x.begin(), x.end()));
        bool match = got[k] == want;
        vals.push_back({{"point", point_str(x)}, {"value", got[k].str()}, {"oracle", want.str()}, {"match", match}});
        o.lines.push_back(point_str(x) + ": " + got[k].str() + (match ? "" : "  (oracle " + want.str() + ")"));
        if (!match) o.residual.push_back(point_str(x) + ": " + (got[k] - want).str());
    }
    o.ok = o.residual.empty();
    o.result = {{"values", vals}};
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact workbench for constant-structure deformation quantization and boundary states"};
    app.require_subcommand(1);
    Config c;
    auto common = [&](CLI::App* s, bool polys) {
        s->add_option("--d", c.d, "target dimension")->check(CLI::PositiveNumber);
        s->add_option("--alpha", c.alpha, "Poisson matrix as JSON rows, or @file");
        s->add_option("--order", c.order, "hbar truncation order")->check(CLI::NonNegativeNumber);
        s->add_option("--seed", c.seed, "seed for randomized suites");
        s->add_option("--format", c.format, "text or json")->check(CLI::IsMember({"text", "json"}));
        s->add_flag("--timing", c.timing, "include wall time in the report");
        if (polys) {
            s->add_option("--f", c.f, "first polynomial")->required();
            s->add_option("--g", c.g, "second polynomial")->required();
        }
    };

    auto* star = app.add_subcommand("star", "f * g");
    common(star, true);
    auto* bracket = app.add_subcommand("bracket", "(f*g - g*f)/eps at eps = 0");
    common(bracket, true);
    auto* assoc = app.add_subcommand("assoc", "randomized associativity battery");
    common(assoc, false);
    int count = 20, max_deg = 3;
    assoc->add_option("--count", count)->check(CLI::PositiveNumber);
    assoc->add_option("--max-deg", max_deg)->check(CLI::NonNegativeNumber);

    auto* verify = app.add_subcommand("verify", "master equations, homotopy, flatness");
    verify->require_subcommand(1);
    auto* mdqme = verify->add_subcommand("mdqme", "quantum master equation on a boundary surface");
    common(mdqme, false);
    std::string surface = "L3", mutate;
    bool no_mut = false;
    mdqme->add_option("--surface", surface)->check(CLI::IsMember({"L1", "L3"}));
    mdqme->add_option("--mutate", mutate, "apply one named mutation");
    mdqme->add_flag("--no-mutations", no_mut, "skip the mutation battery");
    auto* mdcme = verify->add_subcommand("mdcme", "classical master equation");
    common(mdcme, false);
    auto* homotopy = verify->add_subcommand("homotopy", "homotopy identity on the n-interval disk");
    common(homotopy, false);
    int n = 3;
    homotopy->add_option("--n", n, "number of E-intervals")->check(CLI::PositiveNumber);
    homotopy->add_flag("--no-mutations", no_mut);
    auto* flatness = verify->add_subcommand("flatness", "Grothendieck connection on random sections");
    common(flatness, false);
    int flat_count = 100;
    flatness->add_option("--count", flat_count)->check(CLI::PositiveNumber);

    auto* glue = app.add_subcommand("glue", "gluing pipeline");
    glue->require_subcommand(1);
    auto* moyal = glue->add_subcommand("moyal", "f * g at x-tilde through gluing, compared with the oracle");
    common(moyal, true);
    std::string points;
    moyal->add_option("--at", points, "evaluation points: comma-separated rationals, ';' between points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    auto t0 = std::chrono::steady_clock::now();
    auto ms = [&]() {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    };
    try {
        PoissonTensor a = load_alpha(c);
        json inputs = inputs_of(c, a);
        if (*star || *bracket) {
            Poly f = parse_poly(c.f, c.d, c.order), g = parse_poly(c.g, c.d, c.order);
            Poly r = *star ? moyal_product(f, g, a, c.order) : star_bracket(f, g, a);
            Outcome o;
            o.result = r.str();
            o.lines.push_back(r.str());
            return emit(*star ? "star" : "bracket", inputs, o, c, ms());
        }
        if (*assoc) {
            inputs["count"] = count;
            inputs["max_deg"] = max_deg;
            return emit("assoc", inputs, run_assoc(c, a, count, max_deg), c, ms());
        }
        if (*mdqme) {
            VerifyOptions vo;
            vo.mutations = !no_mut && mutate.empty();
            vo.mutate = mutate;
            inputs["surface"] = surface;
            if (!mutate.empty()) inputs["mutate"] = mutate;
            Report r = verify_mdqme(surface == "L1" ? Surface::L1X : Surface::L3, vo);
            return emit("verify mdqme", inputs, report_outcome(r), c, ms());
        }
        if (*mdcme) return emit("verify mdcme", inputs, report_outcome(verify_mdcme()), c, ms());
        if (*homotopy) {
            VerifyOptions vo;
            vo.mutations = !no_mut;
            inputs["n"] = n;
            return emit("verify homotopy", inputs, report_outcome(verify_homotopy(n, vo)), c, ms());
        }
        if (*flatness) {
            inputs["count"] = flat_count;
            return emit("verify flatness", inputs, run_flatness(c, flat_count), c, ms());
        }
        if (*moyal) {
            inputs["at"] = points;
            return emit("glue moyal", inputs, run_glue(c, a, split_points(points)), c, ms());
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "rule budget exceeded: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
