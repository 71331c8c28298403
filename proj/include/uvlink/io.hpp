#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "uvlink/channel.hpp"
#include "uvlink/detection.hpp"
#include "uvlink/localization.hpp"
#include "uvlink/signal.hpp"

namespace uvlink::io {

/// Shortest round-trip decimal form of `value`; "nan"/"inf" for non-finite.
std::string format_number(double value);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Writes `contents` to `path`, creating parent directories. Throws
/// std::runtime_error if the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Columns bin_start_s, arrival_probability.
std::string impulse_response_csv(const ImpulseResponse& ir);
/// Columns chip_index, count.
std::string trace_csv(const PhotoelectronTrace& trace);
/// Columns m, value.
std::string template_csv(const PulseTemplate& pulse);
/// Columns lambda_s, T1_s, ber, lambda_b, threshold.
std::string ber_curve_csv(std::span<const BerPoint> grid);
/// Columns elevation_rad, broadening_s, left_s, right_s, total_arrival.
std::string broadening_csv(std::span<const BroadeningRow> rows);
/// Table-2 layout: one row per quantity, one column per distance in km.
std::string localization_table_csv(std::span<const LocalizationRow> rows);

nlohmann::ordered_json to_json(const Geometry& geometry);
nlohmann::ordered_json to_json(const AtmosphereParams& atmosphere);
nlohmann::ordered_json to_json(const SourceDetectorParams& source);
nlohmann::ordered_json to_json(const ImpulseResponse& ir);  // metadata only
nlohmann::ordered_json to_json(const PhotoelectronTrace& trace);  // metadata only
nlohmann::ordered_json to_json(const LaserComparison& cmp);
nlohmann::ordered_json to_json(const LocalizationRow& row);

}  // namespace uvlink::io
