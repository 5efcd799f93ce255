// uqsd: decides whether an ensemble of multiparticle quantum states admits
// unambiguous discrimination, with and without the LOCC constraint, and
// constructs the certifying objects: discriminating POVMs, local per-party
// POVMs, reciprocal states, and entanglement witnesses when LOCC
// discrimination fails.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "uqsd/instance_io.hpp"

namespace {

using nlohmann::json;
using namespace uqsd;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitPrecondition = 3;

struct Options {
    RunConfig cfg;
    std::string instance_path;
    std::string out_path;
};

void emit(const Options& opt, const json& report) {
    std::string content =
        opt.cfg.format == "text" ? to_text(report) : report.dump(2) + "\n";
    write_output(opt.out_path, content);
}

std::map<int, ProductVector> certificates_of(const FeasibilityReport& report) {
    std::map<int, ProductVector> pis;
    for (const auto& entry : report.entries)
        if (entry.certificate) pis.emplace(entry.mu, *entry.certificate);
    return pis;
}

int cmd_check(const Options& opt, const ParsedInstance& inst) {
    auto report = check_locc(inst.ensemble, opt.cfg.search);
    emit(opt, report_envelope("check", opt.cfg, inst, feasibility_json(report)));
    return report.all_locc_feasible() ? kExitOk : kExitInfeasible;
}

int cmd_povm(const Options& opt, const ParsedInstance& inst) {
    auto report = check_locc(inst.ensemble, opt.cfg.search);
    if (!report.all_locc_feasible()) {
        json results;
        results["feasibility"] = feasibility_json(report);
        results["error"] = "ensemble is not LOCC-discriminable; no POVM constructed";
        emit(opt, report_envelope("povm", opt.cfg, inst, std::move(results)));
        return kExitInfeasible;
    }

    auto pis = certificates_of(report);
    auto global = build_global_povm(inst.ensemble.shape, pis);
    auto table = verify_povm(global, inst.ensemble);
    auto local = build_local_povms(inst.ensemble.shape, pis);
    auto predicted = local.predicted_rates(inst.ensemble);

    json results;
    results["feasibility"] = feasibility_json(report);
    results["global_povm"] = global_povm_json(global);
    results["local_povms"] = local_povm_json(local);
    results["verify"] = povm_table_json(table);
    json pred = json::object();
    for (const auto& [mu, p] : predicted) pred[std::to_string(mu)] = p;
    results["predicted_rates"] = std::move(pred);
    emit(opt, report_envelope("povm", opt.cfg, inst, std::move(results)));
    return kExitOk;
}

int cmd_witness(const Options& opt, const ParsedInstance& inst) {
    if (!full_support_check(inst.ensemble, opt.cfg.search.tol_rank)) {
        std::cerr << "uqsd witness: witness undefined for this ensemble "
                  << "(combined support does not cover the full space)\n";
        return kExitPrecondition;
    }

    bool any_failed = false;
    json entries = json::array();
    for (int mu : inst.ensemble.delta) {
        json e;
        e["mu"] = mu;
        auto s = s_tilde_projector(inst.ensemble, mu, opt.cfg.search.tol_rank);
        e["subspace_dim"] = s.dim();
        if (s.dim() == 0) {
            e["witness"] = nullptr;
            e["note"] = "candidate subspace is zero-dimensional (unconstrained discrimination fails)";
            entries.push_back(std::move(e));
            continue;
        }
        auto built = build_witness(s, opt.cfg.search);
        switch (built.status) {
            case BuildWitnessResult::Status::built: {
                e["witness"] = witness_json(*built.witness);
                auto validation = validate_witness(*built.witness, opt.cfg.trials,
                                                   splitmix64(opt.cfg.search.seed) + mu, opt.cfg.search);
                e["validation"] = witness_validation_json(validation);
                if (!validation.passed) any_failed = true;
                break;
            }
            case BuildWitnessResult::Status::product_state_exists:
                e["witness"] = nullptr;
                e["note"] = "no witness (product state exists)";
                if (built.product) e["product"] = product_vector_json(*built.product);
                break;
            case BuildWitnessResult::Status::validation_failed:
                e["witness"] = nullptr;
                e["note"] = "witness construction rejected: overlap bound unstable across seeds";
                any_failed = true;
                break;
        }
        entries.push_back(std::move(e));
    }
    json results;
    results["witnesses"] = std::move(entries);
    emit(opt, report_envelope("witness", opt.cfg, inst, std::move(results)));
    return any_failed ? kExitInfeasible : kExitOk;
}

int cmd_simulate(const Options& opt, const ParsedInstance& inst) {
    auto report = check_locc(inst.ensemble, opt.cfg.search);
    if (!report.all_locc_feasible()) {
        json results;
        results["feasibility"] = feasibility_json(report);
        results["error"] = "ensemble is not LOCC-discriminable; nothing to simulate";
        emit(opt, report_envelope("simulate", opt.cfg, inst, std::move(results)));
        return kExitInfeasible;
    }

    auto local = build_local_povms(inst.ensemble.shape, certificates_of(report));
    auto sim = run_protocol(inst.ensemble, local, opt.cfg.trials, opt.cfg.search.seed);

    json results;
    results["feasibility"] = feasibility_json(report);
    results["local_povms"] = local_povm_json(local);
    results["simulation"] = simulation_json(sim);
    results["unambiguous"] = sim.total_wrong() == 0;
    emit(opt, report_envelope("simulate", opt.cfg, inst, std::move(results)));
    return kExitOk;
}

int cmd_reciprocal(const Options& opt, const ParsedInstance& inst) {
    if (!inst.all_pure()) {
        std::cerr << "uqsd reciprocal: all states must be pure\n";
        return kExitPrecondition;
    }
    if (inst.ensemble.count() != inst.ensemble.shape.total) {
        std::cerr << "uqsd reciprocal: need exactly D = " << inst.ensemble.shape.total
                  << " states, got " << inst.ensemble.count() << "\n";
        return kExitPrecondition;
    }
    std::vector<CVector> psis;
    for (const auto& v : inst.pure_vectors) psis.push_back(*v);

    std::vector<CVector> duals;
    try {
        duals = reciprocal_states(inst.ensemble.shape, psis, opt.cfg.search.tol_rank);
    } catch (const std::exception& ex) {
        std::cerr << "uqsd reciprocal: " << ex.what() << "\n";
        return kExitPrecondition;
    }

    bool all_product = true;
    json entries = json::array();
    for (std::size_t k = 0; k < duals.size(); ++k) {
        const int mu = static_cast<int>(k) + 1;
        json e;
        e["mu"] = mu;
        e["reciprocal"] = vector_json(duals[k]);
        auto pv = factorize_if_product(duals[k], inst.ensemble.shape, opt.cfg.search.tol_product);
        e["product"] = pv.has_value();
        if (pv) e["factors"] = product_vector_json(*pv)["factors"];
        if (!pv && inst.ensemble.in_delta(mu)) all_product = false;
        entries.push_back(std::move(e));
    }
    json results;
    results["reciprocal_states"] = std::move(entries);
    results["locc_verdict"] = all_product ? "feasible" : "infeasible";
    emit(opt, report_envelope("reciprocal", opt.cfg, inst, std::move(results)));
    return all_product ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unambiguous discrimination of multiparticle quantum states under LOCC"};
    app.require_subcommand(1);

    Options opt;
    std::string command;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("instance", opt.instance_path, "instance file (JSON)")->required();
        sub->add_option("--tol-rank", opt.cfg.search.tol_rank, "relative rank threshold");
        sub->add_option("--tol-product", opt.cfg.search.tol_product, "product-membership threshold");
        sub->add_option("--tol-detect", opt.cfg.search.tol_detect, "detection-overlap threshold");
        sub->add_option("--restarts", opt.cfg.search.restarts, "see-saw restarts");
        sub->add_option("--max-iters", opt.cfg.search.max_iters, "see-saw sweep limit");
        sub->add_option("--seed", opt.cfg.search.seed, "RNG seed");
        sub->add_option("--trials", opt.cfg.trials, "simulation trials / validation samples");
        sub->add_option("--format", opt.cfg.format, "output format: json or text")
            ->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--out", opt.out_path, "write the report to this path (atomic)");
        sub->callback([&, sub] { command = sub->get_name(); });
    };

    add_common(app.add_subcommand("check", "decide unconstrained and LOCC feasibility"));
    add_common(app.add_subcommand("povm", "construct global and local discriminating POVMs"));
    add_common(app.add_subcommand("witness", "build entanglement witnesses for undiscriminable states"));
    add_common(app.add_subcommand("simulate", "Monte Carlo run of the local measurement protocol"));
    add_common(app.add_subcommand("reciprocal", "reciprocal states of a complete pure ensemble"));

    CLI11_PARSE(app, argc, argv);

    ParsedInstance inst;
    try {
        inst = load_instance(opt.instance_path);
    } catch (const InstanceError& ex) {
        std::cerr << "uqsd: " << ex.what() << "\n";
        return kExitInputError;
    }

    try {
        if (command == "check") return cmd_check(opt, inst);
        if (command == "povm") return cmd_povm(opt, inst);
        if (command == "witness") return cmd_witness(opt, inst);
        if (command == "simulate") return cmd_simulate(opt, inst);
        if (command == "reciprocal") return cmd_reciprocal(opt, inst);
    } catch (const std::exception& ex) {
        std::cerr << "uqsd " << command << ": " << ex.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
