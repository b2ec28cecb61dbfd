#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace driftmon {

inline constexpr std::size_t kSensorCount = 6;

// Number of minute-samples standing in for the "two months before the
// drift" rule used by split_dataset.
inline constexpr std::int64_t kPreDriftBufferSamples = 60 * 1440;

// One minute-averaged observation for one motor.
struct SensorFrame {
    std::int64_t timestamp = 0;  // minutes since epoch
    std::vector<double> y;       // winding temperatures, NaN = missing
    double power = 0.0;          // kW
    double speed = 0.0;          // rpm
    double torque = 0.0;         // kNm
    double air_inlet = 0.0;      // degC
    double water_cooling = 0.0;  // degC
    std::vector<double> yhat;    // optional externally supplied predictions
};

struct MotorSeries {
    std::string motor_id;
    std::vector<SensorFrame> frames;             // chronological
    std::vector<std::int64_t> drift_times;       // known drifts, may be empty
    std::size_t gap_count = 0;                   // places where dt > 1 minute

    std::size_t sensor_count() const {
        return frames.empty() ? kSensorCount : frames.front().y.size();
    }
    std::size_t size() const { return frames.size(); }
};

// Half-open index range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

struct DatasetSplit {
    IndexRange train;
    IndexRange validation;
    IndexRange test;
};

// Reads a fleet CSV (header contract in the README). Returns one series per
// motor_id, frames sorted by timestamp. Throws SchemaError on a bad header,
// DataError on malformed rows (the message names the 1-based row number).
std::vector<MotorSeries> parse_fleet_csv(const std::filesystem::path& path);

// Canonical serialization; parse(write(fleet)) reproduces the fleet and
// write(parse(text)) reproduces canonical text byte for byte.
void write_fleet_csv(const std::filesystem::path& path,
                     std::span<const MotorSeries> fleet);

// Reads `motor_id,drift_timestamp` rows and merges them into the fleet.
void load_drift_annotations(const std::filesystem::path& path,
                            std::vector<MotorSeries>& fleet);
void write_drift_annotations(const std::filesystem::path& path,
                             std::span<const MotorSeries> fleet);

// Chronological split. With known drifts the test set starts at the first
// drift minus kPreDriftBufferSamples samples; otherwise it is the last 25%.
// The remaining prefix is halved into train and validation. Throws DataError
// when the prefix is too small to hold both.
DatasetSplit split_dataset(const MotorSeries& series);

}  // namespace driftmon
