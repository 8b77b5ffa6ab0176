// rmc -- command line driver: check, closure, reachinf, translate, selftest.
//
// Exit codes for `check`: 0 holds, 1 violated, 2 unknown, 3 usage or input
// error, 4 internal soundness failure.

#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmc/engines.hpp"
#include "rmc/io.hpp"
#include "rmc/oracle.hpp"

using nlohmann::json;
using namespace rmc;

namespace {

constexpr int kExitHolds = 0;
constexpr int kExitViolated = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 3;
constexpr int kExitSoundness = 4;

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::Holds: return kExitHolds;
        case Verdict::Violated: return kExitViolated;
        default: return kExitUnknown;
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string tok;
    for (char c : text) {
        if (c == ' ' || c == ',' || c == '\t') {
            if (!tok.empty()) out.push_back(tok);
            tok.clear();
        } else {
            tok.push_back(c);
        }
    }
    if (!tok.empty()) out.push_back(tok);
    return out;
}

/// Action names appearing in a formula (identifiers that are not operators).
std::vector<std::string> actions_in_formula(const std::string& text) {
    static const std::set<std::string> keywords{"X", "U", "W", "F", "G", "Fs", "Gs", "true",
                                                "false"};
    std::set<std::string> found;
    std::string tok;
    auto flush = [&] {
        if (!tok.empty() && !keywords.count(tok)) found.insert(tok);
        tok.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
            tok.push_back(c);
        else
            flush();
    }
    flush();
    return {found.begin(), found.end()};
}

struct CommonOptions {
    std::string model_path;
    std::uint32_t max_iter = 64;
    std::uint32_t gfp_iter = 0;  // 0: per-command default
    std::uint32_t tail_bound = 3;
    std::vector<std::string> assume;
    bool as_json = false;
};

Capabilities assumed_caps(const std::vector<std::string>& assume) {
    Capabilities caps;
    for (const auto& a : assume) {
        if (a == "subset-closure")
            caps.subset_closure = true;
        else if (a == "finite-product")
            caps.finite_product = true;
        else if (a == "one-weak-product")
            caps.one_weak_product = true;
        else
            throw InputError("unknown capability '" + a +
                             "' (try subset-closure, finite-product, one-weak-product)");
    }
    return caps;
}

std::unique_ptr<ClosureProvider> make_provider(const ModelFile& model, const CommonOptions& opt) {
    switch (model.kind) {
        case ModelKind::Pushdown:
            return provider_pds(*model.pds);
        case ModelKind::Finite:
            return provider_finite(model.presentation);
        default:
            return provider_generic(model.presentation, opt.max_iter, assumed_caps(opt.assume));
    }
}

EngineConfig engine_config(const CommonOptions& opt, bool want_witness) {
    EngineConfig cfg;
    if (opt.gfp_iter) {
        cfg.rec.max_gfp_iterations = opt.gfp_iter;
        cfg.rec.max_gfp_states = 0;
    }
    cfg.rec.tail_bound = opt.tail_bound;
    cfg.rec.decreasing_shortcut = true;
    cfg.want_witness = want_witness;
    return cfg;
}

json witness_json(const EngineWitness& w) {
    json out;
    out["description"] = w.description;
    json chain = json::array();
    for (const auto& c : w.chain) chain.push_back(word_to_string(c));
    out["chain"] = chain;
    if (w.lasso) {
        out["lasso"] = {{"prefix", word_to_string(w.lasso->first)},
                        {"period", word_to_string(w.lasso->second)}};
    }
    return out;
}

void print_check_result(const CheckResult& r, bool as_json) {
    if (as_json) {
        json out;
        out["verdict"] = verdict_name(r.verdict);
        out["engine"] = r.engine;
        out["init"] = word_to_string(r.init);
        out["provider_seconds"] = r.provider_seconds;
        out["upper_status"] = r.upper_status == BoundStatus::Converged ? "converged" : "bounded";
        out["certificate"] = r.certificate_validated ? "validated" : "none";
        if (!r.note.empty()) out["note"] = r.note;
        if (r.witness) out["witness"] = witness_json(*r.witness);
        std::cout << out.dump(2) << "\n";
        return;
    }
    std::printf("verdict: %s\n", verdict_name(r.verdict));
    std::printf("engine: %s\n", r.engine.c_str());
    std::printf("provider-time: %.6fs\n", r.provider_seconds);
    std::printf("certificate: %s\n", r.certificate_validated ? "validated" : "none");
    if (!r.note.empty()) std::printf("note: %s\n", r.note.c_str());
    if (r.witness) {
        std::printf("witness: %s\n", r.witness->description.c_str());
        if (r.witness->lasso)
            std::printf("  lasso: prefix '%s' period '%s'\n",
                        word_to_string(r.witness->lasso->first).c_str(),
                        word_to_string(r.witness->lasso->second).c_str());
        for (const auto& c : r.witness->chain)
            std::printf("  state: %s\n", word_to_string(c).c_str());
    }
}

void print_owfa(const Owfa& a, bool as_json) {
    if (as_json) {
        json out;
        out["states"] = a.num_states;
        out["initial"] = a.initials;
        json states = json::array();
        for (State s = 0; s < a.num_states; ++s) {
            json st;
            st["state"] = s;
            st["order"] = a.order.empty() ? s : a.order[s];
            st["accepting"] = static_cast<bool>(a.accepting[s]);
            json loop = json::array();
            for (Symbol c : a.self_loop[s]) loop.push_back(symbol_name(c));
            st["loop"] = loop;
            json fair = json::array();
            for (const auto& fs : a.fairness[s]) {
                json one = json::array();
                for (Symbol c : fs) one.push_back(symbol_name(c));
                fair.push_back(one);
            }
            st["fair"] = fair;
            states.push_back(st);
        }
        out["per_state"] = states;
        json edges = json::array();
        for (const auto& e : a.edges) {
            json letters = json::array();
            for (Symbol c : e.letters) letters.push_back(symbol_name(c));
            edges.push_back({{"from", e.src}, {"letters", letters}, {"to", e.dst}});
        }
        out["edges"] = edges;
        std::cout << out.dump(2) << "\n";
        return;
    }
    std::printf("states: %u\n", a.num_states);
    std::printf("initial:");
    for (State s : a.initials) std::printf(" %u", s);
    std::printf("\n");
    auto letters = [](const ltl::LetterSet& ls) {
        std::string out = "{";
        for (std::size_t i = 0; i < ls.size(); ++i) {
            if (i) out += " ";
            out += symbol_name(ls[i]);
        }
        return out + "}";
    };
    for (State s = 0; s < a.num_states; ++s) {
        std::printf("state %u: order=%u%s", s, a.order.empty() ? s : a.order[s],
                    a.accepting[s] ? " accepting" : "");
        if (!a.self_loop[s].empty()) std::printf(" loop=%s", letters(a.self_loop[s]).c_str());
        for (const auto& fs : a.fairness[s]) std::printf(" fair=%s", letters(fs).c_str());
        std::printf("\n");
    }
    for (const auto& e : a.edges)
        std::printf("  %u -%s-> %u\n", e.src, letters(e.letters).c_str(), e.dst);
}

void print_nbwa(const Nbwa& a, bool as_json) {
    if (as_json) {
        json out;
        out["states"] = a.num_states;
        out["initial"] = a.initials;
        json acc = json::array();
        for (State s = 0; s < a.num_states; ++s)
            if (a.accepting[s]) acc.push_back(s);
        out["accepting"] = acc;
        json trans = json::array();
        for (const auto& t : a.transitions)
            trans.push_back({{"from", t.src}, {"letter", symbol_name(t.sym)}, {"to", t.dst}});
        out["transitions"] = trans;
        std::cout << out.dump(2) << "\n";
        return;
    }
    std::printf("states: %u\n", a.num_states);
    std::printf("initial:");
    for (State s : a.initials) std::printf(" %u", s);
    std::printf("\naccepting:");
    for (State s = 0; s < a.num_states; ++s)
        if (a.accepting[s]) std::printf(" %u", s);
    std::printf("\n");
    for (const auto& t : a.transitions)
        std::printf("  %u -%s-> %u\n", t.src, symbol_name(t.sym).c_str(), t.dst);
}

int run_check(const CommonOptions& opt, const std::string& formula, const std::string& init,
              const std::string& engine, bool no_witness) {
    ModelFile model = load_model(opt.model_path);
    ltl::LtlFormula phi = ltl::parse(formula, model.presentation.actions);
    Word v0 = decode_state(model.presentation, init).word;
    EngineConfig cfg = engine_config(opt, !no_witness);
    std::unique_ptr<ClosureProvider> provider = make_provider(model, opt);

    CheckResult result;
    if (engine == "auto") {
        result = auto_check(*provider, model.pds ? &*model.pds : nullptr, phi, v0, cfg);
    } else if (engine == "product") {
        result = check_ltl_product(*provider, phi, v0, cfg);
    } else if (engine == "pathdecomp") {
        if (ltl::is_det(phi))
            result = check_path_decomp(*provider, neg_det_translate(phi), v0, cfg);
        else if (ltl::is_fg(phi))
            result = check_path_decomp(*provider, fg_translate(ltl::negated(phi)), v0, cfg);
        else {
            Nbwa neg = tableau(ltl::negated(phi));
            OneWeakResult chk = one_weak_check(neg);
            if (!chk.one_weak)
                throw InputError(
                    "engine 'pathdecomp' needs a fragment formula or a 1-weak negation");
            result = check_path_decomp(*provider, owfa_from_nbwa(neg), v0, cfg);
        }
    } else if (engine == "pdsbem") {
        if (!model.pds) throw InputError("engine 'pdsbem' needs a pushdown model");
        result = check_pds_bem(*model.pds, phi, v0, cfg);
    } else {
        throw InputError("unknown engine '" + engine + "'");
    }
    print_check_result(result, opt.as_json);
    return verdict_exit(result.verdict);
}

int run_closure(const CommonOptions& opt, const std::string& actions) {
    ModelFile model = load_model(opt.model_path);
    std::unique_ptr<ClosureProvider> provider = make_provider(model, opt);
    std::vector<Symbol> acts;
    if (actions.empty()) {
        acts = model.presentation.actions.symbols();
    } else {
        for (const auto& name : split_list(actions)) {
            auto s = SymbolTable::instance().find(name);
            if (!s || !model.presentation.actions.contains(*s))
                throw InputError("unknown action '" + name + "'");
            acts.push_back(*s);
        }
    }
    const ClosureResult& res = provider->closure(acts);
    if (opt.as_json) {
        json out;
        out["status"] = res.status == ClosureStatus::Converged ? "converged" : "diverged";
        out["iterations"] = res.iterations;
        out["seconds"] = provider->seconds();
        std::stringstream buf;
        write_transducer(buf, res.relation);
        out["relation"] = buf.str();
        std::cout << out.dump(2) << "\n";
    } else {
        std::printf("# status: %s after %u iterations (%.6fs)\n",
                    res.status == ClosureStatus::Converged ? "converged" : "diverged",
                    res.iterations, provider->seconds());
        write_transducer(std::cout, res.relation);
    }
    return res.status == ClosureStatus::Converged ? kExitHolds : kExitUnknown;
}

int run_reachinf(const CommonOptions& opt, const std::string& target_path,
                 const std::string& query) {
    ModelFile model = load_model(opt.model_path);
    std::unique_ptr<ClosureProvider> provider = make_provider(model, opt);
    std::ifstream tf(target_path);
    if (!tf) throw InputError("cannot open target file " + target_path);
    Nfa target = read_nfa(tf);
    if (!(target.alphabet == model.presentation.domain.alphabet))
        throw InputError("target alphabet differs from the state alphabet");
    const ClosureResult& closure = provider->closure(model.presentation.actions.symbols());
    if (closure.status == ClosureStatus::Diverged) {
        if (opt.as_json)
            std::cout << json{{"status", "closure-diverged"}}.dump(2) << "\n";
        else
            std::printf("closure diverged after %u iterations; no answer\n", closure.iterations);
        return kExitUnknown;
    }
    RecurrenceConfig rc{opt.gfp_iter ? opt.gfp_iter : 32, opt.tail_bound, true, 0};
    RecurrenceResult rr = reach_inf(closure.relation, target, rc);
    std::stringstream lower, upper;
    write_nfa(lower, rr.lower);
    write_nfa(upper, rr.upper);
    int code = kExitHolds;
    std::string verdict_text;
    if (!query.empty()) {
        Word q = decode_state(model.presentation, query).word;
        switch (chain_verdict(rr, q)) {
            case ChainVerdict::Yes:
                verdict_text = "member";
                code = kExitHolds;
                break;
            case ChainVerdict::No:
                verdict_text = "non-member";
                code = kExitViolated;
                break;
            default:
                verdict_text = "unknown";
                code = kExitUnknown;
        }
    }
    if (opt.as_json) {
        json out;
        out["status"] = rr.status == BoundStatus::Converged ? "converged" : "bounded";
        out["iterations"] = rr.iterations;
        out["lower"] = lower.str();
        out["upper"] = upper.str();
        out["provider_seconds"] = provider->seconds();
        if (!verdict_text.empty()) out["query"] = verdict_text;
        std::cout << out.dump(2) << "\n";
    } else {
        std::printf("# status: %s after %u iterations\n",
                    rr.status == BoundStatus::Converged ? "converged" : "bounded", rr.iterations);
        if (!verdict_text.empty()) std::printf("# query: %s\n", verdict_text.c_str());
        std::printf("# lower bound (certified members)\n%s", lower.str().c_str());
        std::printf("# upper bound%s\n%s",
                    rr.status == BoundStatus::Converged ? " (exact on convergence)" : "",
                    upper.str().c_str());
    }
    return code;
}

int run_translate(const std::string& formula, const std::string& actions,
                  const std::string& fragment, bool as_json) {
    std::vector<std::string> names =
        actions.empty() ? actions_in_formula(formula) : split_list(actions);
    if (names.empty()) throw InputError("cannot derive an action alphabet; pass --actions");
    Alphabet acts = Alphabet::of_names(names);
    ltl::LtlFormula phi = ltl::parse(formula, acts);
    std::string mode = fragment;
    if (mode == "auto") {
        switch (ltl::classify(phi)) {
            case ltl::Fragment::Det: mode = "det"; break;
            case ltl::Fragment::Fg: mode = "fg"; break;
            default: mode = "full";
        }
    }
    if (mode == "det") {
        if (!ltl::is_det(phi)) throw InputError("formula is outside the deterministic fragment");
        if (!as_json) std::printf("# 1-weak automaton for the negation of: %s\n", ltl::print(phi).c_str());
        print_owfa(neg_det_translate(phi), as_json);
    } else if (mode == "fg") {
        if (!ltl::is_fg(phi)) throw InputError("formula is outside the strict-future fragment");
        if (!as_json) std::printf("# 1-weak fair automaton for: %s\n", ltl::print(phi).c_str());
        print_owfa(fg_translate(phi), as_json);
    } else if (mode == "full") {
        if (!as_json) std::printf("# Büchi automaton for: %s\n", ltl::print(phi).c_str());
        print_nbwa(tableau(phi), as_json);
    } else {
        throw InputError("unknown fragment '" + fragment + "'");
    }
    return kExitHolds;
}

int run_selftest(std::uint64_t seed, std::uint32_t instances, bool as_json) {
    CrossCheckConfig cfg;
    cfg.seed = seed;
    cfg.pds_instances = instances;
    CrossCheckReport rep = cross_check(cfg);

    // file formats must reproduce language-equivalent objects
    std::uint32_t roundtrip_failures = 0;
    {
        SeededRng rng(seed ^ 0x5eedf11e);
        Alphabet ab = Alphabet::of_names({"a", "b"});
        for (int i = 0; i < 20; ++i) {
            Nfa a(ab);
            std::uint32_t n = 2 + rng.below(4);
            for (std::uint32_t s = 0; s < n; ++s) a.add_state();
            a.add_initial(rng.below(n));
            a.add_final(rng.below(n));
            for (int t = 0; t < 8; ++t)
                a.add_transition(rng.below(n), ab.symbols()[rng.below(2)], rng.below(n));
            a.finish();
            std::stringstream buf;
            write_nfa(buf, a);
            if (!equivalent(a, read_nfa(buf)).equal) ++roundtrip_failures;
            Transducer tr = normalize_convolutions({ab, relabel(a, pair_alphabet(ab), [&](Symbol s) {
                                                        return pair_symbol(s, s);
                                                    })});
            std::stringstream buf2;
            write_transducer(buf2, tr);
            if (!rel_equal(tr, read_transducer(buf2))) ++roundtrip_failures;
        }
    }

    bool ok = rep.ok() && roundtrip_failures == 0;
    if (as_json) {
        json out;
        out["checks"] = rep.checks;
        out["path_runs"] = rep.path_runs;
        out["path_definite"] = rep.definite_path;
        out["product_runs"] = rep.product_runs;
        out["product_definite"] = rep.definite_product;
        out["curated_definite"] = rep.curated_definite;
        out["curated_total"] = rep.curated_total;
        out["finite_checks"] = rep.finite_checks;
        out["translation_checks"] = rep.translation_checks;
        out["disagreements"] = rep.disagreements;
        out["soundness_failures"] = rep.soundness_failures;
        out["roundtrip_failures"] = roundtrip_failures;
        out["seconds"] = {{"pdsbem", rep.bem_seconds},
                          {"pathdecomp", rep.path_seconds},
                          {"product", rep.product_seconds},
                          {"provider", rep.provider_seconds}};
        out["failures"] = rep.failures;
        out["ok"] = ok;
        std::cout << out.dump(2) << "\n";
    } else {
        std::printf("exact-engine checks: %u\n", rep.checks);
        std::printf("fragment pipeline: %u runs, %u definite\n", rep.path_runs, rep.definite_path);
        std::printf("product pipeline: %u runs, %u definite\n", rep.product_runs,
                    rep.definite_product);
        std::printf("curated instances: %u/%u definite and agreeing\n", rep.curated_definite,
                    rep.curated_total);
        std::printf("finite-graph comparisons: %u\n", rep.finite_checks);
        std::printf("translation lasso checks: %u\n", rep.translation_checks);
        std::printf("file round-trips: %s\n", roundtrip_failures ? "FAILED" : "ok");
        std::printf("timings: pdsbem %.2fs, pathdecomp %.2fs, product %.2fs (provider %.2fs)\n",
                    rep.bem_seconds, rep.path_seconds, rep.product_seconds, rep.provider_seconds);
        for (const auto& f : rep.failures) std::printf("FAILURE: %s\n", f.c_str());
        std::printf("selftest: %s\n", ok ? "ok" : "FAILED");
    }
    return ok ? kExitHolds : kExitSoundness;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"model checking over automaton-presented infinite-state systems"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string formula, init, engine = "auto", actions, fragment = "auto";
    std::string target, query;
    bool no_witness = false;
    std::uint64_t seed = 1;
    std::uint32_t instances = 25;

    auto add_common = [&](CLI::App* cmd, bool with_model = true) {
        if (with_model) cmd->add_option("-m,--model", opt.model_path, "model file")->required();
        cmd->add_option("--max-iter", opt.max_iter, "closure iteration bound");
        cmd->add_option("--gfp-iter", opt.gfp_iter, "fixpoint iteration bound");
        cmd->add_option("--tail-bound", opt.tail_bound, "longest explicit pump loop");
        cmd->add_option("--assume", opt.assume,
                        "asserted capabilities for presentation models "
                        "(subset-closure, finite-product, one-weak-product)");
        cmd->add_flag("--json", opt.as_json, "machine-readable output");
    };

    CLI::App* check = app.add_subcommand("check", "decide whether every run satisfies a formula");
    add_common(check);
    check->add_option("-f,--formula", formula, "temporal formula")->required();
    check->add_option("-i,--init", init, "initial state (symbols, space separated)")->required();
    check->add_option("--engine", engine, "auto|product|pathdecomp|pdsbem");
    check->add_flag("--no-witness", no_witness, "skip witness extraction");

    CLI::App* closure = app.add_subcommand("closure", "compute a step-closure transducer");
    add_common(closure);
    closure->add_option("--actions", actions, "action subset (default: all)");

    CLI::App* reachinf = app.add_subcommand("reachinf", "recurrent reachability of a target set");
    add_common(reachinf);
    reachinf->add_option("--target", target, "automaton file over the state alphabet")->required();
    reachinf->add_option("--query", query, "ask about one state");

    CLI::App* translate = app.add_subcommand("translate", "translate a formula to an automaton");
    translate->add_option("-f,--formula", formula, "temporal formula")->required();
    translate->add_option("--actions", actions, "action alphabet (default: derived)");
    translate->add_option("--fragment", fragment, "auto|det|fg|full");
    translate->add_flag("--json", opt.as_json, "machine-readable output");

    CLI::App* selftest = app.add_subcommand("selftest", "run the committed cross-check suites");
    selftest->add_option("--seed", seed, "suite seed");
    selftest->add_option("--instances", instances, "random instances");
    selftest->add_flag("--json", opt.as_json, "machine-readable output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return run_check(opt, formula, init, engine, no_witness);
        if (closure->parsed()) return run_closure(opt, actions);
        if (reachinf->parsed()) return run_reachinf(opt, target, query);
        if (translate->parsed()) return run_translate(formula, actions, fragment, opt.as_json);
        if (selftest->parsed()) return run_selftest(seed, instances, opt.as_json);
    } catch (const SoundnessError& e) {
        std::cerr << "soundness failure: " << e.what() << "\n";
        return kExitSoundness;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
