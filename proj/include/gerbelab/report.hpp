#ifndef GERBELAB_REPORT_HPP
#define GERBELAB_REPORT_HPP

// JSON reports (schema 1). Complex numbers are {re, im} objects; every knob
// that affects a number is echoed under "config".

#include "gerbelab/basicgerbe.hpp"
#include "gerbelab/simpx.hpp"

#include <json.hpp>

#include <string>

namespace gerbelab::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;

inline Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json check_json(const basicgerbe::CheckResult& c) {
  return Json{{"check_id", c.id},
              {"space", c.space},
              {"samples", c.samples},
              {"max_abs_residual", c.max_abs_residual},
              {"tolerance", c.tolerance},
              {"pass", c.pass},
              {"worst_sample", c.worst_sample}};
}

inline Json conditions_json(const simpx::DResidualReport& r) {
  Json out = Json::array();
  for (const auto& c : r.conditions)
    out.push_back(Json{{"form_degree", c.form_degree},
                       {"level", c.level},
                       {"evaluated", c.evaluated},
                       {"probes", c.probes},
                       {"max_abs_residual", c.max_abs}});
  return out;
}

inline Json thm52_json(const basicgerbe::Thm52Report& r, long long wallclock_ms = 0) {
  const auto& c = r.config;
  Json cfg{{"n", c.n},
           {"samples", c.samples},
           {"seed", c.seed},
           {"tol_closed", c.tol_closed},
           {"tol_fd", c.tol_fd},
           {"fd_step", c.fd_step},
           {"tangent_tuples", c.tangent_tuples},
           {"e4_tuples", c.e4_tuples},
           {"eps_cut", c.eps_cut},
           {"eps_gap", c.eps_gap},
           {"quadrature",
            {{"initial_nodes", c.quadrature.initial_nodes},
             {"max_nodes", c.quadrature.max_nodes},
             {"rel_tol", c.quadrature.rel_tol},
             {"r_in", c.quadrature.r_in},
             {"r_out", c.quadrature.r_out}}},
           {"delta_convention", "sum_i (-1)^i d_i^*"},
           {"cocycle", "(0, 0, omega/(2 pi i), nu)"}};
  Json checks = Json::array();
  for (const auto& ch : r.checks) checks.push_back(check_json(ch));
  return Json{{"schema", kSchema},
              {"suite", "verify-thm52"},
              {"config", cfg},
              {"checks", checks},
              {"cocycle_conditions", conditions_json(r.cocycle)},
              {"resample_count", r.resample_count},
              {"pass", r.pass()},
              {"wallclock_ms", wallclock_ms}};
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace gerbelab::report

#endif  // GERBELAB_REPORT_HPP
