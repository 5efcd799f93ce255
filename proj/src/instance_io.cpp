#include "uqsd/instance_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace uqsd {

using nlohmann::json;

bool ParsedInstance::all_pure() const {
    for (const auto& v : pure_vectors)
        if (!v) return false;
    return true;
}

namespace {

cdouble parse_complex(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InstanceError(where + ": expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

CVector parse_vector(const json& j, int expected, const std::string& where) {
    if (!j.is_array()) throw InstanceError(where + ": expected an array");
    if (static_cast<int>(j.size()) != expected)
        throw InstanceError(where + ": expected " + std::to_string(expected) + " entries, got " +
                            std::to_string(j.size()));
    CVector v(expected);
    for (int i = 0; i < expected; ++i) v(i) = parse_complex(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

CMatrix parse_matrix(const json& j, int expected, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != expected)
        throw InstanceError(where + ": expected " + std::to_string(expected) + " rows");
    CMatrix m(expected, expected);
    for (int i = 0; i < expected; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != expected)
            throw InstanceError(where + ": row " + std::to_string(i) + " must have " +
                                std::to_string(expected) + " entries");
        for (int k = 0; k < expected; ++k)
            m(i, k) = parse_complex(row[k], where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    return m;
}

}  // namespace

ParsedInstance parse_instance(const json& j) {
    if (!j.is_object()) throw InstanceError("instance: top level must be an object");
    if (!j.contains("dims")) throw InstanceError("instance: missing field 'dims'");
    if (!j.contains("states")) throw InstanceError("instance: missing field 'states'");

    std::vector<int> dims;
    for (const auto& d : j.at("dims")) {
        if (!d.is_number_integer()) throw InstanceError("dims: entries must be integers");
        dims.push_back(d.get<int>());
    }
    SpaceShape shape;
    try {
        shape = SpaceShape::of(dims);
    } catch (const std::exception& ex) {
        throw InstanceError(std::string("dims: ") + ex.what());
    }

    const json& jstates = j.at("states");
    if (!jstates.is_array() || jstates.size() < 2)
        throw InstanceError("states: need an array of at least two states");

    std::vector<DensityMatrix> states;
    std::vector<std::optional<CVector>> pure_vectors;
    for (std::size_t k = 0; k < jstates.size(); ++k) {
        const std::string where = "states[" + std::to_string(k) + "]";
        const json& js = jstates[k];
        if (!js.is_object() || !js.contains("type")) throw InstanceError(where + ": missing 'type'");
        const std::string type = js.at("type").get<std::string>();
        try {
            if (type == "pure") {
                CVector v = parse_vector(js.at("vector"), shape.total, where + ".vector");
                double n = v.norm();
                if (std::abs(n - 1.0) > 1e-6)
                    throw InstanceError(where + ".vector: norm " + std::to_string(n) + " is not 1");
                v /= n;
                states.push_back(DensityMatrix::pure(shape, v));
                pure_vectors.push_back(v);
            } else if (type == "mixed") {
                CMatrix m = parse_matrix(js.at("matrix"), shape.total, where + ".matrix");
                double tr = m.trace().real();
                if (std::abs(tr - 1.0) > 1e-6)
                    throw InstanceError(where + ".matrix: trace " + std::to_string(tr) + " is not 1");
                states.push_back(DensityMatrix::from_matrix(shape, m / tr));
                pure_vectors.push_back(std::nullopt);
            } else {
                throw InstanceError(where + ".type: must be 'pure' or 'mixed'");
            }
        } catch (const InstanceError&) {
            throw;
        } catch (const std::exception& ex) {
            throw InstanceError(where + ": " + ex.what());
        }
    }

    std::vector<int> delta;
    if (j.contains("delta")) {
        for (const auto& d : j.at("delta")) {
            if (!d.is_number_integer()) throw InstanceError("delta: entries must be integers");
            delta.push_back(d.get<int>());
        }
    }
    std::vector<double> priors;
    if (j.contains("priors")) {
        for (const auto& p : j.at("priors")) {
            if (!p.is_number()) throw InstanceError("priors: entries must be numbers");
            priors.push_back(p.get<double>());
        }
    }

    ParsedInstance inst;
    try {
        inst.ensemble = StateEnsemble::make(shape, std::move(states), delta, priors);
    } catch (const std::exception& ex) {
        throw InstanceError(std::string("instance: ") + ex.what());
    }
    inst.pure_vectors = std::move(pure_vectors);

    inst.echo["dims"] = inst.ensemble.shape.dims;
    inst.echo["delta"] = inst.ensemble.delta;
    json echo_states = json::array();
    for (std::size_t k = 0; k < inst.pure_vectors.size(); ++k) {
        json s;
        if (inst.pure_vectors[k]) {
            s["type"] = "pure";
            s["vector"] = vector_json(*inst.pure_vectors[k]);
        } else {
            s["type"] = "mixed";
            s["matrix"] = matrix_json(inst.ensemble.states[k].matrix);
        }
        echo_states.push_back(std::move(s));
    }
    inst.echo["states"] = std::move(echo_states);
    if (!inst.ensemble.priors.empty()) inst.echo["priors"] = inst.ensemble.priors;
    return inst;
}

ParsedInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InstanceError("cannot open instance file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& ex) {
        throw InstanceError(path + ": " + ex.what());
    }
    return parse_instance(j);
}

json complex_json(const cdouble& z) { return json::array({z.real(), z.imag()}); }

json vector_json(const CVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
    return out;
}

json matrix_json(const CMatrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
        out.push_back(std::move(row));
    }
    return out;
}

json config_json(const RunConfig& cfg) {
    json out;
    out["tol_rank"] = cfg.search.tol_rank;
    out["tol_product"] = cfg.search.tol_product;
    out["tol_detect"] = cfg.search.tol_detect;
    out["restarts"] = cfg.search.restarts;
    out["max_iters"] = cfg.search.max_iters;
    out["conv_tol"] = cfg.search.conv_tol;
    out["weight_w"] = cfg.search.weight_w;
    out["seed"] = cfg.search.seed;
    out["trials"] = cfg.trials;
    out["format"] = cfg.format;
    return out;
}

json product_vector_json(const ProductVector& pv) {
    json factors = json::array();
    for (const auto& f : pv.factors) factors.push_back(vector_json(f));
    json out;
    out["factors"] = std::move(factors);
    out["assembled"] = vector_json(assemble(pv));
    return out;
}

json feasibility_json(const FeasibilityReport& report) {
    json states = json::array();
    for (const auto& s : report.entries) {
        json e;
        e["mu"] = s.mu;
        e["unconstrained_feasible"] = s.unconstrained;
        if (s.locc == Feasibility::undetermined)
            e["locc_feasible"] = "undetermined";
        else
            e["locc_feasible"] = s.locc == Feasibility::feasible;
        e["method"] = s.method;
        e["detect_value"] = s.detect_value;
        e["membership"] = s.membership;
        if (s.certificate) e["certificate"] = product_vector_json(*s.certificate);
        states.push_back(std::move(e));
    }
    json out;
    out["states"] = std::move(states);
    out["all_unconstrained"] = report.all_unconstrained();
    out["all_locc_feasible"] = report.all_locc_feasible();
    return out;
}

json global_povm_json(const GlobalPOVM& povm) {
    json out;
    out["lambda"] = povm.lambda;
    json conclusive = json::object();
    for (std::size_t k = 0; k < povm.delta.size(); ++k)
        conclusive[std::to_string(povm.delta[k])] = matrix_json(povm.conclusive[k]);
    out["conclusive"] = std::move(conclusive);
    out["inconclusive"] = matrix_json(povm.inconclusive);
    return out;
}

json local_povm_json(const LocalPOVMSet& lp) {
    json parties = json::array();
    for (std::size_t jdx = 0; jdx < lp.parties.size(); ++jdx) {
        json party;
        party["lambda"] = lp.lambdas[jdx];
        json conclusive = json::object();
        for (std::size_t k = 0; k < lp.delta.size(); ++k)
            conclusive[std::to_string(lp.delta[k])] = matrix_json(lp.parties[jdx].conclusive[k]);
        party["conclusive"] = std::move(conclusive);
        party["inconclusive"] = matrix_json(lp.parties[jdx].inconclusive);
        parties.push_back(std::move(party));
    }
    json out;
    out["parties"] = std::move(parties);
    out["prefactor"] = lp.prefactor();
    return out;
}

json povm_table_json(const PovmTable& table) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < table.probs.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < table.probs.cols(); ++k) row.push_back(table.probs(i, k));
        rows.push_back(std::move(row));
    }
    json columns = json::array();
    for (int mu : table.delta) columns.push_back(std::to_string(mu));
    columns.push_back("?");

    json out;
    out["columns"] = std::move(columns);
    out["rows"] = std::move(rows);
    out["max_offdiagonal"] = table.max_offdiagonal;
    out["min_diagonal"] = table.min_diagonal;
    out["unambiguous"] = table.unambiguous;
    return out;
}

json witness_json(const WitnessOperator& wop) {
    json out;
    out["gamma"] = wop.gamma;
    out["projector_dim"] = wop.projector_dim;
    out["matrix"] = matrix_json(wop.w);
    out["projector"] = matrix_json(wop.projector);
    return out;
}

json witness_validation_json(const WitnessValidation& val) {
    json out;
    out["samples"] = val.samples;
    out["violations"] = val.violations;
    out["min_product_expectation"] = val.min_product_expectation;
    out["recheck_overlap"] = val.recheck_overlap;
    out["recheck_ok"] = val.recheck_ok;
    out["detected_value"] = val.detected_value;
    out["passed"] = val.passed;
    return out;
}

json simulation_json(const SimulationReport& report) {
    json rows = json::array();
    for (const auto& row : report.per_state) {
        json r;
        r["mu"] = row.mu;
        r["prepared"] = row.prepared;
        r["conclusive_correct"] = row.conclusive_correct;
        r["conclusive_wrong"] = row.conclusive_wrong;
        r["inconclusive"] = row.inconclusive;
        r["empirical_rate"] = row.empirical_rate;
        r["predicted_rate"] = row.predicted_rate;
        rows.push_back(std::move(r));
    }
    json out;
    out["trials"] = report.trials;
    out["seed"] = report.seed;
    out["per_state"] = std::move(rows);
    out["conclusive_wrong_total"] = report.total_wrong();
    return out;
}

json report_envelope(const std::string& command, const RunConfig& cfg, const ParsedInstance& inst,
                     json results) {
    json out;
    out["tool"] = "uqsd";
    out["version"] = kToolVersion;
    out["command"] = command;
    out["config"] = config_json(cfg);
    out["instance"] = inst.echo;
    out["results"] = std::move(results);
    return out;
}

namespace {

void render_text(const json& j, const std::string& prefix, std::ostringstream& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.value().is_object() || it.value().is_array()) {
                out << prefix << it.key() << ":\n";
                render_text(it.value(), prefix + "  ", out);
            } else {
                out << prefix << it.key() << ": " << it.value().dump() << "\n";
            }
        }
    } else if (j.is_array()) {
        bool scalars = true;
        for (const auto& el : j)
            if (el.is_object() || el.is_array()) scalars = false;
        if (scalars) {
            out << prefix << j.dump() << "\n";
        } else {
            for (std::size_t i = 0; i < j.size(); ++i) {
                out << prefix << "- [" << i << "]\n";
                render_text(j[i], prefix + "  ", out);
            }
        }
    } else {
        out << prefix << j.dump() << "\n";
    }
}

}  // namespace

std::string to_text(const json& j) {
    std::ostringstream out;
    render_text(j, "", out);
    return out.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write output file: " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

}  // namespace uqsd
