#include "oufreq/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "oufreq/error.hpp"
#include "oufreq/ou_basis.hpp"
#include "oufreq/parallel.hpp"

namespace oufreq {

namespace {
int g_threads = 1;
}

int thread_count() { return g_threads; }
void set_thread_count(int n) { g_threads = std::max(1, n); }

std::string_view version() { return "0.1.0"; }

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex_digest(std::string_view bytes) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(bytes);
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, end);
}

std::string csv_join(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::string metadata_line(const std::map<std::string, std::string>& fields) {
  std::string out = "#";
  for (const auto& [k, v] : fields) out += " " + k + "=" + v;
  return out;
}

std::string basis_json(const OUBasis& basis) {
  nlohmann::ordered_json j;
  j["N"] = basis.N;
  j["gram_residual"] = basis.gram_residual;
  j["bilinear_residual"] = basis.bilinear_residual;
  auto& modes = j["modes"] = nlohmann::ordered_json::array();
  for (const auto& m : basis.modes) {
    nlohmann::ordered_json e;
    e["j"] = m.j;
    e["n"] = m.n;
    e["alpha"] = m.alpha;
    e["gamma"] = m.gamma;
    e["mu"] = m.mu;
    e["poly"] = m.poly.coeffs;
    e["norm"] = m.norm_L;
    modes.push_back(std::move(e));
  }
  return j.dump(2);
}

std::string basis_hash(const OUBasis& basis) {
  std::string text = basis_json(basis);
  if (basis.spectrum) {
    text += csv_join(basis.spectrum->eigenvalues);
    text += csv_join(basis.spectrum->eigenvectors.data());
  }
  return hex_digest(text);
}

void write_csv(const std::string& path, const std::map<std::string, std::string>& meta,
               const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << metadata_line(meta) << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) out << csv_join(r) << '\n';
  if (!out) throw Error("write failed for " + path);
}

}  // namespace oufreq
