#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "family.hpp"
#include "frame.hpp"
#include "perturbation.hpp"
#include "projection.hpp"
#include "types.hpp"

// Frame-family files and experiment reports.
//
// Family file (JSON):
//   { "format_version": 1, "dim_h": d_H, "dim_k": d_K, "count": J, "scalar": "complex128",
//     "operators": [ j ][ i ][ row ][ col ] = [re, im] }
// where operators[j][i] is the d_K x d_K matrix G_j(e_i). Doubles are written
// in shortest round-trip form, so load(save(F)) == F bit for bit.
//
// Sweep reports are CSV with a fixed header; verdict/analysis reports are a
// single JSON document. Every report carries experiment, timestamp and seed.

namespace hsframe::io {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json complex_to_json(const Scalar& z) { return json::array({z.real(), z.imag()}); }

inline json family_to_json(const HSFrameFamily& family) {
  json ops = json::array();
  for (const auto& g : family.maps()) {
    json images = json::array();
    for (Index i = 0; i < family.dim_h(); ++i) {
      const HSElement img = g.image(i);
      json rows = json::array();
      for (Index r = 0; r < img.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < img.cols(); ++c) row.push_back(complex_to_json(img(r, c)));
        rows.push_back(std::move(row));
      }
      images.push_back(std::move(rows));
    }
    ops.push_back(std::move(images));
  }
  return json{{"format_version", kFormatVersion},
              {"dim_h", family.dim_h()},
              {"dim_k", family.dim_k()},
              {"count", family.size()},
              {"scalar", "complex128"},
              {"operators", std::move(ops)}};
}

namespace detail {

inline Index positive_int(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ValidationError(std::string("family file: missing field '") + key + "'");
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw ValidationError(std::string("family file: field '") + key + "' must be a positive integer");
  return static_cast<Index>(v.get<long long>());
}

}  // namespace detail

/// Validates every shape before building the family; errors name the offending index.
inline HSFrameFamily family_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("family file: top level must be an object");
  if (!doc.contains("format_version") || !doc.at("format_version").is_number_integer() ||
      doc.at("format_version").get<int>() != kFormatVersion)
    throw ValidationError("family file: unsupported or missing format_version (expected 1)");
  if (!doc.contains("scalar") || doc.at("scalar") != "complex128")
    throw ValidationError("family file: scalar must be \"complex128\"");
  const Index d_h = detail::positive_int(doc, "dim_h");
  const Index d_k = detail::positive_int(doc, "dim_k");
  const Index count = detail::positive_int(doc, "count");
  if (!doc.contains("operators") || !doc.at("operators").is_array())
    throw ValidationError("family file: missing operators array");
  const json& ops = doc.at("operators");
  if (static_cast<Index>(ops.size()) != count)
    throw ValidationError("family file: count = " + std::to_string(count) + " but operators has " +
                          std::to_string(ops.size()) + " entries");
  std::vector<HSMap> maps;
  maps.reserve(static_cast<std::size_t>(count));
  for (Index j = 0; j < count; ++j) {
    const std::string where = "operators[j=" + std::to_string(j) + "]";
    const json& images = ops.at(static_cast<std::size_t>(j));
    if (!images.is_array() || static_cast<Index>(images.size()) != d_h)
      throw ValidationError(where + ": expected " + std::to_string(d_h) + " images");
    Matrix block(d_k * d_k, d_h);
    for (Index i = 0; i < d_h; ++i) {
      const json& rows = images.at(static_cast<std::size_t>(i));
      const std::string at = where + "[i=" + std::to_string(i) + "]";
      if (!rows.is_array() || static_cast<Index>(rows.size()) != d_k)
        throw ValidationError(at + ": expected " + std::to_string(d_k) + " rows");
      for (Index r = 0; r < d_k; ++r) {
        const json& row = rows.at(static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<Index>(row.size()) != d_k)
          throw ValidationError(at + ": row " + std::to_string(r) + " must have " + std::to_string(d_k) + " entries");
        for (Index c = 0; c < d_k; ++c) {
          const json& z = row.at(static_cast<std::size_t>(c));
          if (!z.is_array() || z.size() != 2 || !z.at(0).is_number() || !z.at(1).is_number())
            throw ValidationError(at + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
                                  ") must be a [re, im] pair");
          block(r * d_k + c, i) = Scalar(z.at(0).get<double>(), z.at(1).get<double>());
        }
      }
    }
    maps.emplace_back(d_k, std::move(block));
  }
  return HSFrameFamily(d_h, d_k, std::move(maps));
}

/// Writes through a temporary file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string dump_family(const HSFrameFamily& family) { return family_to_json(family).dump(1) + "\n"; }

inline HSFrameFamily parse_family(const std::string& text, const std::string& source = "<memory>") {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  try {
    return family_from_json(doc);
  } catch (const ShapeError& e) {
    throw ValidationError(source + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

inline void save_family(const HSFrameFamily& family, const std::filesystem::path& path) {
  write_atomic(path, dump_family(family));
}

inline HSFrameFamily load_family(const std::filesystem::path& path) {
  return parse_family(read_file(path), path.string());
}

/// 17 significant digits; enough for an exact double round trip.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Provenance columns shared by every report.
struct ReportHeader {
  std::string experiment;
  std::string timestamp;
  std::uint64_t seed = 0;
};

inline const std::vector<std::string>& convergence_columns() {
  static const std::vector<std::string> cols = {"experiment", "timestamp", "seed",  "n",
                                                "m_n",        "r_n",       "err_plain", "err_oversampled",
                                                "crit2",      "crit3",     "strong_residual", "section_singular"};
  return cols;
}

inline std::string convergence_csv(const std::vector<ConvergenceRecord>& records, const ReportHeader& h) {
  std::ostringstream os;
  const auto& cols = convergence_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << "\n";
  for (const auto& r : records) {
    os << h.experiment << "," << h.timestamp << "," << h.seed << "," << r.n << "," << r.m_n << "," << r.r_n << ","
       << format_double(r.err_plain) << "," << format_double(r.err_oversampled) << "," << format_double(r.crit2)
       << "," << format_double(r.crit3) << "," << format_double(r.strong_residual) << "," << (r.singular ? 1 : 0)
       << "\n";
  }
  return os.str();
}

inline json bounds_to_json(const FrameBounds& b) { return json{{"lower", b.lower}, {"upper", b.upper}}; }

inline json frame_report_to_json(const FrameReport& r) {
  json j{{"lower_bound", r.lower_bound},
         {"upper_bound", r.upper_bound},
         {"bessel", r.bessel},
         {"frame", r.frame},
         {"riesz", r.riesz},
         {"complete", r.complete},
         {"synthesis_norm", r.synthesis_norm},
         {"pseudo_inverse_norm", r.pseudo_inverse_norm},
         {"rank", r.rank},
         {"coefficient_dim", r.coefficient_dim}};
  j["riesz_lower"] = r.riesz_lower ? json(*r.riesz_lower) : json(nullptr);
  j["riesz_upper"] = r.riesz_upper ? json(*r.riesz_upper) : json(nullptr);
  return j;
}

inline json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
  return a;
}

inline json verdict_to_json(const PerturbationVerdict& v) {
  json j{{"condition", to_string(v.mode)},
         {"constants",
          {{"lambda1", v.constants.lambda1},
           {"lambda2", v.constants.lambda2},
           {"mu", v.constants.mu},
           {"nu", v.constants.nu}}},
         {"admissibility", {{"first", v.admissible.first}, {"second", v.admissible.second}}},
         {"certified", v.certified},
         {"satisfied", v.satisfied},
         {"empirical_margin", v.empirical_margin},
         {"samples", v.samples},
         {"reference_bounds", bounds_to_json(v.reference)},
         {"actual_bounds", bounds_to_json(v.actual)},
         {"gamma_is_frame", v.gamma_is_frame},
         {"within_prediction", v.within_prediction}};
  j["predicted_bounds"] = v.predicted ? bounds_to_json(*v.predicted) : json(nullptr);
  j["witness"] = v.witness ? vector_to_json(*v.witness) : json(nullptr);
  return j;
}

inline json header_to_json(const ReportHeader& h) {
  return json{{"experiment", h.experiment}, {"timestamp", h.timestamp}, {"seed", h.seed}};
}

}  // namespace hsframe::io
