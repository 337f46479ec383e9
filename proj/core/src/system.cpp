#include "stabcert/system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stabcert/errors.hpp"
#include "stabcert/numeric.hpp"

namespace stabcert {

using nlohmann::json;

Eigen::MatrixXd SystemSpec::gstar_at(double t) const {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : gstar) G(e.i - 1, e.j - 1) += e.coeff.value(t);
  return G;
}

Eigen::VectorXd SystemSpec::eta_at(double t) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < static_cast<int>(forcing.eta.size()) && i < n; ++i)
    v(i) = forcing.eta[i].value(t);
  return v;
}

Eigen::VectorXd SystemSpec::forcing_at(double t) const {
  if (forcing.F0 == 0) return Eigen::VectorXd::Zero(n);
  return forcing.F0 * eta_at(t);
}

Eigen::VectorXd SystemSpec::rhs(double t, const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = A * x;
  for (const auto& e : gstar) out(e.i - 1) += e.coeff.value(t) * x(e.j - 1);
  if (!f_terms.empty()) out += f_at(t, x);
  if (forcing.F0 != 0) out += forcing_at(t);
  return out;
}

double SystemSpec::min_period() const {
  double p = 0;
  auto take = [&p](double q) {
    if (q > 0 && (p == 0 || q < p)) p = q;
  };
  for (const auto& e : gstar) take(e.coeff.min_period());
  for (const auto& term : f_terms) take(term.coeff.min_period());
  for (const auto& c : forcing.eta) take(c.min_period());
  return p;
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParseError(msg);
}

double finite(const json& j, const std::string& field) {
  require(j.is_number(), "field '" + field + "' must be a number");
  const double v = j.get<double>();
  require(std::isfinite(v), "field '" + field + "' is not finite");
  return v;
}

TimeCoeff parse_coeff(const json& j, const std::string& ctx) {
  TimeCoeff c;
  if (j.is_number()) {
    c.offset = finite(j, ctx);
    return c;
  }
  require(j.is_object(), ctx + " must be a number or {offset, sinusoids}");
  if (j.contains("offset")) c.offset = finite(j.at("offset"), ctx + ".offset");
  if (j.contains("sinusoids")) {
    require(j.at("sinusoids").is_array(), ctx + ".sinusoids must be an array");
    for (const auto& s : j.at("sinusoids")) {
      Sinusoid sn;
      sn.amplitude = finite(s.at("amp"), ctx + ".amp");
      sn.angular_frequency = finite(s.at("freq"), ctx + ".freq");
      require(sn.angular_frequency >= 0, ctx + ".freq must be >= 0");
      if (s.contains("phase")) sn.phase = finite(s.at("phase"), ctx + ".phase");
      c.sinusoids.push_back(sn);
    }
  }
  return c;
}

SystemSpec parse_spec(const json& j, const std::string& origin) {
  SystemSpec spec;
  require(j.contains("n"), "missing field 'n'");
  spec.n = j.at("n").get<int>();
  require(spec.n >= 1, "'n' must be >= 1");
  if (j.contains("name")) spec.name = j.at("name").get<std::string>();
  if (j.contains("t0")) spec.t0 = finite(j.at("t0"), "t0");

  require(j.contains("A"), "missing matrix 'A'");
  const auto& ja = j.at("A");
  require(ja.is_array() && static_cast<int>(ja.size()) == spec.n,
          "'A' must be an n x n row-major array");
  spec.A.resize(spec.n, spec.n);
  for (int r = 0; r < spec.n; ++r) {
    require(ja[r].is_array() && static_cast<int>(ja[r].size()) == spec.n,
            "'A' row " + std::to_string(r + 1) + " has wrong length");
    for (int c = 0; c < spec.n; ++c)
      spec.A(r, c) = finite(ja[r][c], "A[" + std::to_string(r + 1) + "][" +
                                          std::to_string(c + 1) + "]");
  }
  require(spec.A.cwiseAbs().maxCoeff() > 0, "'A' must be nonzero");

  if (j.contains("Gstar")) {
    for (const auto& e : j.at("Gstar")) {
      GstarEntry g;
      g.i = e.at("i").get<int>();
      g.j = e.at("j").get<int>();
      require(g.i >= 1 && g.i <= spec.n && g.j >= 1 && g.j <= spec.n,
              "Gstar index out of range");
      g.coeff = parse_coeff(e, "Gstar entry");
      spec.gstar.push_back(g);
    }
  }

  if (j.contains("f_terms")) {
    for (const auto& e : j.at("f_terms")) {
      MonomialTerm term;
      term.component = e.at("component").get<int>();
      require(term.component >= 1 && term.component <= spec.n,
              "f_terms component out of range");
      term.coeff = parse_coeff(e.at("coeff"), "f_terms coeff");
      const auto& ex = e.at("exponents");
      require(ex.is_array() && static_cast<int>(ex.size()) == spec.n,
              "f_terms exponents must have length n");
      for (const auto& v : ex) {
        const int p = v.get<int>();
        require(p >= 0, "f_terms exponents must be >= 0");
        term.exponents.push_back(p);
      }
      require(term.total_degree() >= 1,
              "f_terms total degree must be >= 1 (nonlinearity vanishes at 0)");
      spec.f_terms.push_back(term);
    }
  }

  if (j.contains("forcing")) {
    const auto& jf = j.at("forcing");
    spec.forcing.F0 = finite(jf.at("F0"), "forcing.F0");
    require(spec.forcing.F0 >= 0, "forcing.F0 must be >= 0");
    if (jf.contains("eta")) {
      const auto& je = jf.at("eta");
      require(je.is_array() && static_cast<int>(je.size()) == spec.n,
              "forcing.eta must have length n");
      for (const auto& c : je)
        spec.forcing.eta.push_back(parse_coeff(c, "forcing.eta"));
    }
  }
  if (spec.forcing.eta.empty())
    spec.forcing.eta.assign(spec.n, TimeCoeff{});
  (void)origin;
  return spec;
}

}  // namespace

SupEstimate sup_eta_norm(const std::vector<TimeCoeff>& eta, double t0) {
  SupEstimate est;
  double ub2 = 0;
  double slowest = 0;
  bool constant = true;
  for (const auto& c : eta) {
    ub2 += c.envelope() * c.envelope();
    if (!c.is_constant()) constant = false;
    for (const auto& s : c.sinusoids)
      if (s.amplitude != 0 && s.angular_frequency > 0)
        slowest = std::max(slowest, 2 * M_PI / s.angular_frequency);
  }
  est.upper_bound = std::sqrt(ub2);
  auto norm_at = [&eta](double t) {
    double s = 0;
    for (const auto& c : eta) {
      const double v = c.value(t);
      s += v * v;
    }
    return std::sqrt(s);
  };
  if (constant) {
    est.value = norm_at(t0);
    return est;
  }
  const double span = std::max(200.0, 40 * slowest);
  const int n_samples = 20001;
  auto [t_best, v_best] = grid_max(norm_at, t0, t0 + span, n_samples);
  const double h = span / (n_samples - 1);
  auto [t_ref, v_ref] =
      golden_max(norm_at, std::max(t0, t_best - h), t_best + h, 1e-12);
  est.value = std::max(v_best, v_ref);
  return est;
}

SystemSpec load_spec_from_string(const std::string& text,
                                 const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  SystemSpec spec;
  try {
    spec = parse_spec(j, origin);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }

  // Entries with a nonzero offset must still be zero-mean overall.
  for (const auto& e : spec.gstar) {
    if (e.coeff.offset != 0) {
      const double slow = spec.min_period();
      const double horizon = std::max(1000.0, 200 * slow);
      const auto rep = validate_zero_mean(spec, horizon, 1e-2);
      require(rep.pass, origin + ": Gstar is not zero-mean (max entry mean " +
                            std::to_string(rep.max_mean_entry) + ")");
      break;
    }
  }

  // Normalize the forcing profile so sup||eta|| = 1.
  if (spec.forcing.F0 > 0) {
    const auto est = sup_eta_norm(spec.forcing.eta, spec.t0);
    require(est.value > 0, origin + ": forcing.F0 > 0 but eta is zero");
    const double s = est.value;
    if (std::abs(s - 1.0) > 1e-12) {
      for (auto& c : spec.forcing.eta) c.scale(1.0 / s);
      spec.forcing.F0 *= s;
    }
  }
  return spec;
}

SystemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spec file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_spec_from_string(ss.str(), path);
}

ZeroMeanReport validate_zero_mean(const SystemSpec& spec, double horizon,
                                  double tol) {
  ZeroMeanReport rep;
  const double slow = spec.min_period();
  const int cells =
      std::max(2000, slow > 0 ? static_cast<int>(horizon / slow * 32) : 2000);
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(spec.n, spec.n);
  for (const auto& e : spec.gstar) {
    const auto& c = e.coeff;
    means(e.i - 1, e.j - 1) +=
        gauss5_composite([&c](double t) { return c.value(t); }, spec.t0,
                         spec.t0 + horizon, cells) /
        horizon;
  }
  rep.max_mean_entry = means.cwiseAbs().maxCoeff();
  rep.pass = rep.max_mean_entry <= tol;
  return rep;
}

}  // namespace stabcert
