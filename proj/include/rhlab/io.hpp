#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rhlab/certifier.hpp"
#include "rhlab/horseshoe.hpp"
#include "rhlab/orbit.hpp"
#include "rhlab/pliss.hpp"

namespace rhlab::io {

// Fixed 17-significant-digit rendering; nan/inf spelled out.
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(unsigned long long x);
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(std::size_t x) { return cell(static_cast<unsigned long long>(x)); }
  CsvWriter& cell(const std::string& s);
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

nlohmann::json to_json(const Arc& a);
nlohmann::json to_json(const Interval& i);
nlohmann::json to_json(const PredominanceReport& r);
nlohmann::json to_json(const SineCertification& s);
nlohmann::json to_json(const FrequencyBound& fb);
nlohmann::json to_json(const FrequencyReport& r);
nlohmann::json to_json(const SurvivalCurve& c);
nlohmann::json to_json(const LyapunovEstimate& e);
nlohmann::json to_json(const BallCheckReport& r);
nlohmann::json to_json(const ShadowResult& s);
nlohmann::json to_json(const DensityReport& d);
nlohmann::json to_json(const SurvivalMReport& s);
nlohmann::json to_json(const H4Estimate& h);

}  // namespace rhlab::io
