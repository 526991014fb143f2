#pragma once

// CSV and JSON rendering of reports. Numbers use the shortest round-trip
// decimal form, so identical values always print identically.

#include <charconv>
#include <cmath>
#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lmoment/identity_lab.hpp"
#include "lmoment/lvalues.hpp"
#include "lmoment/moments.hpp"

namespace lmoment {

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// JSON has no inf or nan; they are written as strings.
inline nlohmann::ordered_json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

inline constexpr const char* kMomentCsvHeader =
    "q,q1,q2,re_sum,im_sum,main_term,re_ratio,im_ratio,s1_re,s1_im,s2_re,s2_im,n_chars,runtime_ms";

inline std::string moment_csv_row(const MomentReport& r) {
  std::string out;
  auto put = [&out](const std::string& s) {
    if (!out.empty()) out += ',';
    out += s;
  };
  put(std::to_string(r.q));
  put(std::to_string(r.q1));
  put(std::to_string(r.q2));
  put(format_number(r.family_sum.real()));
  put(format_number(r.family_sum.imag()));
  put(format_number(r.main_term));
  put(format_number(r.ratio.real()));
  put(format_number(r.ratio.imag()));
  put(format_number(r.s1.real()));
  put(format_number(r.s1.imag()));
  put(format_number(r.s2.real()));
  put(format_number(r.s2.imag()));
  put(std::to_string(r.num_characters));
  put(std::to_string(r.runtime_ms));
  return out;
}

inline void write_moment_csv(std::ostream& os, const std::vector<MomentReport>& rows) {
  os << kMomentCsvHeader << '\n';
  for (const auto& r : rows) os << moment_csv_row(r) << '\n';
}

inline nlohmann::ordered_json to_json(const MomentReport& r) {
  nlohmann::ordered_json j;
  j["q"] = r.q;
  j["q1"] = r.q1;
  j["q2"] = r.q2;
  j["re_sum"] = json_number(r.family_sum.real());
  j["im_sum"] = json_number(r.family_sum.imag());
  j["main_term"] = json_number(r.main_term);
  j["re_ratio"] = json_number(r.ratio.real());
  j["im_ratio"] = json_number(r.ratio.imag());
  j["s1_re"] = json_number(r.s1.real());
  j["s1_im"] = json_number(r.s1.imag());
  j["s2_re"] = json_number(r.s2.real());
  j["s2_im"] = json_number(r.s2.imag());
  j["n_chars"] = r.num_characters;
  j["runtime_ms"] = r.runtime_ms;
  return j;
}

inline void write_moment_json(std::ostream& os, const std::vector<MomentReport>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  os << arr.dump(2) << '\n';
}

inline nlohmann::ordered_json to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["cases_run"] = r.cases_run;
  j["max_abs_deviation"] = json_number(r.max_abs_deviation);
  j["tolerance"] = json_number(r.tolerance);
  j["passed"] = r.passed;
  j["flagged_exception"] = r.flagged_exception;
  j["worst_case"] = r.worst_case;
  return j;
}

inline nlohmann::ordered_json to_json(const CentralValueRecord& r) {
  nlohmann::ordered_json j;
  j["chi_id"] = r.chi_id;
  j["product_re"] = json_number(r.product_afe.real());
  j["product_im"] = json_number(r.product_afe.imag());
  j["l_chi_re"] = json_number(r.l_chi.real());
  j["l_chi_im"] = json_number(r.l_chi.imag());
  j["l_twist_re"] = json_number(r.l_twist.real());
  j["l_twist_im"] = json_number(r.l_twist.imag());
  j["truncation_n"] = r.truncation_n;
  j["tail_estimate"] = json_number(r.tail_estimate);
  return j;
}

inline constexpr const char* kCentralCsvHeader =
    "chi_id,product_re,product_im,l_chi_re,l_chi_im,l_twist_re,l_twist_im,truncation_n,tail_estimate";

inline std::string central_csv_row(const CentralValueRecord& r) {
  return std::to_string(r.chi_id) + ',' + format_number(r.product_afe.real()) + ',' +
         format_number(r.product_afe.imag()) + ',' + format_number(r.l_chi.real()) + ',' +
         format_number(r.l_chi.imag()) + ',' + format_number(r.l_twist.real()) + ',' +
         format_number(r.l_twist.imag()) + ',' + std::to_string(r.truncation_n) + ',' +
         format_number(r.tail_estimate);
}

}  // namespace lmoment
