#include "fountain/artifacts.hpp"

#include "fountain/format.hpp"
#include "fountain/fourier.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fountain {

namespace {

void emit(const Json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        emit(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        emit(v, indent, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json doubles(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  emit(j, indent, 0, out);
  return out;
}

Json to_json(const AuditReport& r) {
  Json j;
  j["condition"] = r.condition;
  j["verdict"] = to_string(r.verdict);
  j["samples_evaluated"] = r.samples_evaluated;
  j["worst_margin"] = number(r.worst_margin);
  j["note"] = r.note;
  j["parameters"] = Json::object();
  for (const auto& [k, v] : r.parameters) j["parameters"][k] = number(v);
  j["diagnostics"] = Json::object();
  for (const auto& [k, v] : r.diagnostics) j["diagnostics"][k] = number(v);
  j["violations"] = Json::array();
  for (const auto& s : r.violations) j["violations"].push_back({{"t", number(s.t)}, {"u", doubles(s.u)}, {"margin", number(s.margin)}});
  return j;
}

Json to_json(const CriticalPoint& cp, bool with_samples) {
  Json j;
  j["lambda"] = number(cp.lambda);
  j["k"] = cp.k;
  j["value"] = number(cp.value);
  j["grad_norm"] = number(cp.grad_norm);
  j["residual"] = number(cp.residual);
  j["norm_E"] = number(cp.norm_E);
  j["morse"] = cp.morse;
  j["trivial"] = cp.trivial;
  j["iterations"] = cp.iterations;
  j["amplitude"] = number(fourier::interpolated_sup(cp.u));
  j["period_divisor"] = fourier::period_divisor(cp.u);
  const auto& g = cp.u.grid();
  j["nodes"] = g.nodes();
  j["dim"] = g.dim();
  if (with_samples) {
    const auto& v = cp.u.values();
    j["u"] = doubles(std::vector<double>(v.data(), v.data() + v.size()));
  }
  return j;
}

Json to_json(const Branch& b) {
  Json j;
  j["status"] = to_string(b.status);
  j["note"] = b.note;
  j["lambda"] = Json::array();
  j["value"] = Json::array();
  j["norm_E"] = Json::array();
  for (const auto& p : b.points) {
    j["lambda"].push_back(number(p.lambda));
    j["value"].push_back(number(p.value));
    j["norm_E"].push_back(number(p.norm_E));
  }
  return j;
}

Json to_json(const BoundednessReport& r) {
  return {{"passed", r.passed},
          {"exponents", doubles(r.exponents)},
          {"coefficients", doubles(r.coefficients)},
          {"held_out", number(r.held_out)},
          {"prediction", number(r.prediction)},
          {"note", r.note}};
}

Json to_json(const ResidualReport& r) {
  return {{"sup", number(r.sup)},
          {"l2", number(r.l2)},
          {"worst_node", r.worst_node},
          {"periodicity_defect", number(r.periodicity_defect)}};
}

Json to_json(const GeometryReport& g) {
  Json j;
  j["k"] = g.k;
  j["lambda"] = number(g.lambda);
  j["p"] = number(g.p);
  for (const auto& [name, v] :
       {std::pair{"ell_emp", g.ell_emp}, {"ell_cert", g.ell_cert}, {"ell1_emp", g.ell1_emp},
        {"ell1_cert", g.ell1_cert}, {"tau_inf_Y", g.tau_inf_Y}, {"tau_inf_Z", g.tau_inf_Z}, {"rho", g.rho},
        {"r", g.r}, {"alpha_hat", g.alpha_hat}, {"alpha_floor", g.alpha_floor}, {"beta_hat", g.beta_hat},
        {"beta_ceiling", g.beta_ceiling}, {"xi_hat", g.xi_hat}, {"xi_floor", g.xi_floor},
        {"zeta_bar", g.zeta_bar}, {"C_k", g.C_k}, {"delta_or_S", g.delta_or_S}, {"eps_k", g.eps_k},
        {"rho_bound", g.rho_bound}})
    j[name] = number(v);
  j["flags"] = Json::object();
  for (const auto& [k, v] : g.flags) j["flags"][k] = v;
  return j;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path directory) : dir_(std::move(directory)) {
  std::filesystem::create_directories(dir_);
}

void ArtifactWriter::write(const std::string& name, const std::string& content) {
  std::lock_guard lock(mutex_);
  const auto target = dir_ / name;
  const auto tmp = dir_ / (name + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
    if (!os) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
  std::erase_if(entries_, [&](const Entry& e) { return e.name == name; });
  entries_.push_back({name, content.size(), sha256_hex(content)});
}

std::vector<ArtifactWriter::Entry> ArtifactWriter::written() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

}  // namespace fountain
