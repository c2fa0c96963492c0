#include "korea/config.hpp"

#include "korea/errors.hpp"
#include "korea/io.hpp"

#include <json.hpp>

#include <set>

namespace korea {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& section, const std::set<std::string>& known) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + section + key + "'");
  }
}

Eigen::VectorXd to_vector(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd to_matrix(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
      throw Error(ErrorCode::InvalidArgument, "W0 must be square");
    }
    for (Eigen::Index c = 0; c < n; ++c) m(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
  }
  return m;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  RunConfig cfg;
  try {
    const json j = json::parse(json_text);
    reject_unknown(j, "", {"hyper", "vb", "em", "synth"});
    if (j.contains("hyper")) {
      const auto& h = j.at("hyper");
      reject_unknown(h, "hyper.", {"alpha0", "beta0", "m0", "W0", "nu0"});
      if (h.contains("alpha0")) cfg.hyper.alpha0 = h.at("alpha0").get<double>();
      if (h.contains("beta0")) cfg.hyper.beta0 = h.at("beta0").get<double>();
      if (h.contains("m0")) cfg.hyper.m0 = to_vector(h.at("m0"));
      if (h.contains("W0")) cfg.hyper.W0 = to_matrix(h.at("W0"));
      if (h.contains("nu0")) cfg.hyper.nu0 = h.at("nu0").get<double>();
    }
    if (j.contains("vb")) {
      const auto& v = j.at("vb");
      reject_unknown(v, "vb.", {"tol", "max_iter", "restarts"});
      cfg.vb.tol = v.value("tol", cfg.vb.tol);
      cfg.vb.max_iter = v.value("max_iter", cfg.vb.max_iter);
      cfg.vb.restarts = v.value("restarts", cfg.vb.restarts);
    }
    if (j.contains("em")) {
      const auto& e = j.at("em");
      reject_unknown(e, "em.", {"tol", "max_iter", "restarts", "var_floor"});
      cfg.em.tol = e.value("tol", cfg.em.tol);
      cfg.em.max_iter = e.value("max_iter", cfg.em.max_iter);
      cfg.em.restarts = e.value("restarts", cfg.em.restarts);
      cfg.em.var_floor = e.value("var_floor", cfg.em.var_floor);
    }
    if (j.contains("synth")) {
      const auto& s = j.at("synth");
      reject_unknown(s, "synth.", {"radius", "wishart_dof", "dirichlet_alpha", "min_weight", "wishart_draws_covariance"});
      cfg.synth.radius = s.value("radius", cfg.synth.radius);
      cfg.synth.wishart_dof = s.value("wishart_dof", cfg.synth.wishart_dof);
      if (s.contains("dirichlet_alpha")) cfg.synth.dirichlet_alpha = s.at("dirichlet_alpha").get<double>();
      cfg.synth.min_weight = s.value("min_weight", cfg.synth.min_weight);
      cfg.synth.wishart_draws_covariance = s.value("wishart_draws_covariance", cfg.synth.wishart_draws_covariance);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
  }
  if (!(cfg.vb.tol > 0.0) || cfg.vb.max_iter < 1 || cfg.vb.restarts < 1) {
    throw Error(ErrorCode::InvalidArgument, "config: vb needs tol > 0, max_iter >= 1, restarts >= 1");
  }
  if (!(cfg.em.tol > 0.0) || cfg.em.max_iter < 1 || cfg.em.restarts < 1 || !(cfg.em.var_floor > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "config: em needs tol > 0, max_iter >= 1, restarts >= 1, var_floor > 0");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_text(path)); }

}  // namespace korea
