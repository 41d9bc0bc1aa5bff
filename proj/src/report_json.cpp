#include "gwlife/report_json.hpp"

namespace gwlife {

using nlohmann::ordered_json;

namespace {

template <class T>
ordered_json optional_json(const std::optional<T>& x) {
    if (!x) return nullptr;
    if constexpr (std::is_same_v<T, ExtendedReal>) {
        return to_json(*x);
    } else {
        return *x;
    }
}

} // namespace

ordered_json to_json(const ExtendedReal& x) {
    if (x.is_infinite()) return "inf";
    ordered_json out;
    out["finite"] = x.value();
    return out;
}

ordered_json to_json(const SeriesValue& x) {
    ordered_json out;
    out["value"] = to_json(x.value);
    out["tail_bound"] = x.tail_bound;
    out["terms"] = x.terms;
    return out;
}

ordered_json to_json(const SpectralReport& r) {
    ordered_json out;
    out["gamma"] = r.gamma;
    out["rho"] = r.rho;
    out["radius_case"] = to_string(r.radius_case);
    out["criticality"] = to_string(r.criticality);
    out["ml"] = r.ml;
    out["R"] = to_json(r.R);
    out["F_at_R"] = to_json(r.F_at_R);
    out["root_residual"] = r.root_residual;
    out["iterations"] = r.iterations;
    out["m_gprime_at_gamma"] = optional_json(r.m_gprime_at_gamma);
    return out;
}

ordered_json to_json(const BoundaryValue& b) {
    ordered_json out;
    out["value"] = to_json(b.value);
    out["error_bound"] = b.error_bound;
    out["at_least_one"] = b.at_least_one;
    out["certified_below_one"] = b.certified_below_one;
    return out;
}

ordered_json to_json(const RecurrenceClass& r) {
    ordered_json out;
    out["kind"] = to_string(r.kind);
    out["criticality"] = to_string(r.criticality);
    out["clause"] = r.clause;
    out["ml"] = r.ml;
    out["F_at_R"] = optional_json(r.F_at_R);
    out["g2"] = optional_json(r.g2);
    return out;
}

ordered_json to_json(const InvariantSystem& s) {
    ordered_json out;
    out["K"] = s.K;
    out["gamma"] = s.gamma;
    out["u"] = s.u;
    out["v"] = s.v;
    out["S"] = to_json(s.S);
    out["S_error"] = s.S_error;
    out["vu"] = to_json(s.vu);
    out["growth_constant"] = optional_json(s.growth_constant);
    out["printed_constant"] = optional_json(s.printed_constant);
    out["growth_note"] = s.growth_note;
    out["u_residual"] = s.u_residual;
    out["v_residual"] = s.v_residual;
    out["measure_head_residual"] = s.measure_head_residual;
    return out;
}

ordered_json to_json(const ExtinctionReport& r) {
    ordered_json out;
    out["q"] = r.q;
    out["certain"] = r.certain;
    out["residual"] = r.residual;
    out["iterations"] = r.iterations;
    return out;
}

ordered_json to_json(const SimulationSummary& s) {
    ordered_json out;
    out["replicates"] = s.replicates;
    out["horizon"] = s.horizon;
    out["master_seed"] = s.master_seed;
    out["population_cap"] = s.population_cap;
    out["extinct"] = s.extinct;
    out["capped"] = s.capped;
    out["ran_out"] = s.ran_out;
    out["extinction_frequency"] = s.extinction_frequency;
    out["half_width"] = s.half_width;
    out["rho"] = optional_json(s.rho);
    ordered_json growth = ordered_json::array();
    for (const GenerationStats& g : s.growth) {
        ordered_json e;
        e["generation"] = g.generation;
        e["samples"] = g.samples;
        e["capped_before"] = g.capped_before;
        e["mean_total"] = g.mean_total;
        e["se_total"] = g.se_total;
        e["normalized"] = g.normalized;
        e["normalized_se"] = g.normalized_se;
        e["type_means"] = g.type_means;
        e["type_se"] = g.type_se;
        growth.push_back(std::move(e));
    }
    out["growth"] = std::move(growth);
    return out;
}

ordered_json to_json(const RadiusSequence& s) {
    ordered_json out;
    out["method"] = to_string(s.method);
    out["k"] = s.k_values;
    out["rho"] = s.rho;
    return out;
}

} // namespace gwlife
