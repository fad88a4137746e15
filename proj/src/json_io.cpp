#include "bgcoh/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace bgcoh {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump_into(const Json& v, std::string& out, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (v.type()) {
    case Json::value_t::number_float: out += format_double(v.get<double>()); return;
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        out += pad;
        dump_into(v[i], out, depth + 1);
        out += i + 1 < v.size() ? ",\n" : "\n";
      }
      out += close + "]";
      return;
    }
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = v.begin(); it != v.end(); ++it, ++i) {
        out += pad + Json(it.key()).dump() + ": ";
        dump_into(it.value(), out, depth + 1);
        out += i + 1 < v.size() ? ",\n" : "\n";
      }
      out += close + "}";
      return;
    }
    default: out += v.dump(); return;
  }
}

Json doubles(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(x);
  return a;
}

Json optional_double(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

}  // namespace

std::string dump_json(const Json& value) {
  std::string out;
  dump_into(value, out, 0);
  out += "\n";
  return out;
}

Json bigint_json(const BigInt& value) {
  if (value >= std::numeric_limits<long long>::min() && value <= std::numeric_limits<long long>::max())
    return Json(static_cast<long long>(value));
  return Json(value.str());
}

Json to_json(const WeightedAction& action) {
  Json j;
  j["weights"] = action.weights;
  j["twist"] = action.twist;
  return j;
}

Json to_json(const LevelSetProfile& p) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < p.size(); ++i)
    rows.push_back(Json{{"t", p.t[i]}, {"a", p.a[i]}, {"b", p.b[i]}, {"g", p.g[i]}, {"nu", p.nu[i]}});
  return Json{{"samples_per_level", p.samples_per_level}, {"levels", rows}};
}

Json to_json(const AdmissibleFunction& s, bool with_trace) {
  using K = AdmissibleFunction::Kind;
  Json j;
  switch (s.kind()) {
    case K::Sqrt:
      j["kind"] = "sqrt";
      j["knots"] = Json::array();
      break;
    case K::Constant:
      j["kind"] = "constant";
      j["value"] = s.constant_value();
      j["knots"] = Json::array();
      break;
    case K::Grid: {
      j["kind"] = "grid";
      j["tail_rate"] = s.tail_rate();
      Json knots = Json::array();
      for (const auto& k : s.knots()) knots.push_back(Json{{"t", k.u}, {"s", k.s}, {"s_prime", k.s_prime}});
      j["knots"] = knots;
      break;
    }
    case K::Combination: {
      j["kind"] = "combination";
      Json terms = Json::array();
      for (const auto& t : s.terms())
        terms.push_back(Json{{"coefficient", t.coefficient}, {"function", to_json(t.function, false)}});
      j["terms"] = terms;
      break;
    }
  }
  if (with_trace && s.trace()) {
    const auto& tr = *s.trace();
    j["trace"] = Json{{"epsilon", tr.epsilon},      {"u", doubles(tr.u)},
                      {"floor", doubles(tr.floor)}, {"r", doubles(tr.r)},
                      {"r_prime", doubles(tr.r_prime)}, {"r_second", doubles(tr.r_second)},
                      {"c", doubles(tr.c)},         {"tail_integral", doubles(tr.tail_integral)}};
  }
  return j;
}

AdmissibleFunction admissible_from_json(const Json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "sqrt") return AdmissibleFunction::reference_sqrt();
    if (kind == "constant") return AdmissibleFunction::constant(j.at("value").get<double>());
    if (kind == "grid") {
      std::vector<Knot> knots;
      for (const auto& k : j.at("knots"))
        knots.push_back({k.at("t").get<double>(), k.at("s").get<double>(), k.at("s_prime").get<double>()});
      return AdmissibleFunction::grid(std::move(knots), j.value("tail_rate", 0.0));
    }
    if (kind == "combination") {
      std::vector<AdmissibleTerm> terms;
      for (const auto& t : j.at("terms"))
        terms.push_back({t.at("coefficient").get<double>(), admissible_from_json(t.at("function"))});
      return AdmissibleFunction::combination(std::move(terms));
    }
    throw ValidationError("admissible function: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("admissible function: malformed JSON: ") + e.what());
  }
}

Json to_json(const AdmissibilityReport& r) {
  Json ratio = Json::array();
  for (std::size_t i = 0; i < r.t.size(); ++i)
    ratio.push_back(Json{{"t", r.t[i]}, {"value", r.ratio[i]}, {"log_value", r.log_ratio[i]}});
  return Json{{"pass", r.pass},
              {"target", r.target},
              {"twist", r.twist},
              {"threshold_t", optional_double(r.threshold_t)},
              {"first_offending_t", optional_double(r.first_offending_t)},
              {"reason", r.reason},
              {"bochner_tail", r.bochner_tail},
              {"ratio", ratio}};
}

Json to_json(const BettiTable& table) {
  Json values = Json::array();
  const std::size_t len = table.entries.empty() ? 0 : table.entries[0].size();
  for (std::size_t i = 0; i < len; ++i) {
    Json row = Json::array();
    for (const auto& col : table.entries) row.push_back(bigint_json(col[i]));
    values.push_back(Json{{"m", table.m_lo + static_cast<long long>(i)}, {"betti", row}});
  }
  return Json{{"weights", table.action.weights},
              {"twist", table.action.twist},
              {"window", Json::array({table.m_lo, table.m_hi})},
              {"values", values}};
}

Json to_json(const IndexCharacter& ch, const WeightedAction& action) {
  Json values = Json::array();
  for (std::size_t i = 0; i < ch.values.size(); ++i)
    values.push_back(Json{{"m", ch.m_lo + static_cast<long long>(i)}, {"index", bigint_json(ch.values[i])}});
  return Json{{"weights", action.weights},
              {"twist", action.twist},
              {"window", Json::array({ch.m_lo, ch.m_hi})},
              {"values", values}};
}

Json to_json(const SpectrumResult& r) {
  Json eig, res, thr;
  for (int d = 0; d < 2; ++d) {
    const auto key = std::to_string(d);
    eig[key] = doubles(r.degrees[d].eigenvalues);
    res[key] = doubles(r.degrees[d].residuals);
    thr[key] = Json{{"eps_zero", r.degrees[d].eps_zero}, {"gap_floor", r.degrees[d].gap_floor}};
  }
  return Json{{"m", r.m},
              {"j", r.j ? Json(*r.j) : Json(nullptr)},
              {"empty_mode", r.empty_mode},
              {"grid_meta",
               Json{{"n", r.grid.n},
                    {"radius", r.grid.radius},
                    {"spacing", spacing_name(r.grid.spacing)},
                    {"stretch", r.grid.stretch},
                    {"refinement", r.grid.refinement}}},
              {"kernel_dims", Json::array({r.kernel_dims[0], r.kernel_dims[1]})},
              {"eigenvalues", eig},
              {"residuals", res},
              {"thresholds", thr}};
}

Json to_json(const InvarianceReport& rep) {
  Json modes = Json::array();
  for (const auto& e : rep.entries) {
    Json row{{"m", e.m},
             {"dims_s1", Json::array({e.first.kernel_dims[0], e.first.kernel_dims[1]})},
             {"dims_s2", Json::array({e.second.kernel_dims[0], e.second.kernel_dims[1]})},
             {"equal", e.equal}};
    if (!e.equal) {
      row["spectrum_s1"] = to_json(e.first);
      row["spectrum_s2"] = to_json(e.second);
    }
    modes.push_back(row);
  }
  return Json{{"all_equal", rep.all_equal}, {"modes", modes}};
}

Json to_json(const KodairaScan& scan) {
  Json pts = Json::array();
  for (const auto& p : scan.points)
    pts.push_back(Json{{"k", p.k}, {"gap", p.gap}, {"kernel_dim0", p.kernel_dim0}, {"expected_dim0", p.expected_dim0}});
  return Json{{"m", scan.m},
              {"k0", scan.k0 ? Json(*scan.k0) : Json(nullptr)},
              {"tail_monotone", scan.tail_monotone},
              {"dims_match", scan.dims_match},
              {"points", pts}};
}

Json to_json(const OracleResult& r) {
  return Json{{"j", r.j},
              {"radius", r.radius},
              {"n_r", r.n_r},
              {"n_theta", r.n_theta},
              {"eigenvalues", Json{{"0", doubles(r.eigenvalues[0])}, {"1", doubles(r.eigenvalues[1])}}}};
}

std::string betti_csv(const BettiTable& table) {
  std::ostringstream out;
  out << "m";
  for (std::size_t p = 0; p < table.entries.size(); ++p) out << ",p" << p;
  out << "\n";
  const std::size_t len = table.entries.empty() ? 0 : table.entries[0].size();
  for (std::size_t i = 0; i < len; ++i) {
    out << table.m_lo + static_cast<long long>(i);
    for (const auto& col : table.entries) out << "," << col[i].str();
    out << "\n";
  }
  return out.str();
}

std::string index_csv(const IndexCharacter& ch) {
  std::ostringstream out;
  out << "m,index\n";
  for (std::size_t i = 0; i < ch.values.size(); ++i)
    out << ch.m_lo + static_cast<long long>(i) << "," << ch.values[i].str() << "\n";
  return out.str();
}

std::string ratio_csv(const AdmissibilityReport& r) {
  std::ostringstream out;
  out << "t,ratio,log_ratio\n";
  for (std::size_t i = 0; i < r.t.size(); ++i)
    out << format_double(r.t[i]) << "," << format_double(r.ratio[i]) << "," << format_double(r.log_ratio[i]) << "\n";
  return out.str();
}

std::string spectrum_csv(const std::vector<SpectrumResult>& results) {
  std::ostringstream out;
  out << "m,dim0,dim1,gap0,gap1\n";
  for (const auto& r : results) {
    auto gap = [&](int d) -> std::string {
      const auto& ds = r.degrees[d];
      if (ds.kernel_dim < static_cast<int>(ds.eigenvalues.size())) return format_double(ds.eigenvalues[ds.kernel_dim]);
      return "";
    };
    out << r.m << "," << r.kernel_dims[0] << "," << r.kernel_dims[1] << "," << gap(0) << "," << gap(1) << "\n";
  }
  return out.str();
}

std::string invariance_csv(const InvarianceReport& rep) {
  std::ostringstream out;
  out << "m,dim0_s1,dim1_s1,dim0_s2,dim1_s2,equal\n";
  for (const auto& e : rep.entries)
    out << e.m << "," << e.first.kernel_dims[0] << "," << e.first.kernel_dims[1] << "," << e.second.kernel_dims[0]
        << "," << e.second.kernel_dims[1] << "," << (e.equal ? "true" : "false") << "\n";
  return out.str();
}

std::string kodaira_csv(const KodairaScan& scan) {
  std::ostringstream out;
  out << "k,gap\n";
  for (const auto& p : scan.points) out << p.k << "," << format_double(p.gap) << "\n";
  return out.str();
}

}  // namespace bgcoh
