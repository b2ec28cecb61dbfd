#include "driftmon/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "driftmon/errors.hpp"

namespace driftmon {
namespace {

constexpr const char* kHeader =
    "timestamp,motor_id,t1,t2,t3,t4,t5,t6,power,speed,torque,air_inlet,"
    "water_cooling";
constexpr const char* kHeaderYhat =
    "timestamp,motor_id,t1,t2,t3,t4,t5,t6,power,speed,torque,air_inlet,"
    "water_cooling,yhat1,yhat2,yhat3,yhat4,yhat5,yhat6";

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& cell, std::size_t row, bool allow_empty) {
    if (cell.empty()) {
        if (allow_empty) return std::numeric_limits<double>::quiet_NaN();
        throw DataError("row " + std::to_string(row) + ": empty numeric field");
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw DataError("row " + std::to_string(row) + ": bad numeric value '" +
                        cell + "'");
    }
    return value;
}

std::int64_t parse_int(const std::string& cell, std::size_t row) {
    std::int64_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw DataError("row " + std::to_string(row) + ": bad timestamp '" +
                        cell + "'");
    }
    return value;
}

void format_double(std::string& out, double v) {
    if (std::isnan(v)) return;  // missing values serialize as empty cells
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

}  // namespace

std::vector<MotorSeries> parse_fleet_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();

    bool has_yhat = false;
    if (line == kHeaderYhat) {
        has_yhat = true;
    } else if (line != kHeader) {
        throw SchemaError("unexpected header in " + path.string() + ": " + line);
    }
    const std::size_t ncols = has_yhat ? 19 : 13;

    // Preserve first-appearance order of motors.
    std::map<std::string, std::size_t> index;
    std::vector<MotorSeries> fleet;
    std::vector<std::vector<std::size_t>> row_numbers;

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != ncols) {
            throw DataError("row " + std::to_string(row) + ": expected " +
                            std::to_string(ncols) + " fields, got " +
                            std::to_string(cells.size()));
        }
        SensorFrame frame;
        frame.timestamp = parse_int(cells[0], row);
        const std::string& motor = cells[1];
        if (motor.empty())
            throw DataError("row " + std::to_string(row) + ": empty motor_id");
        frame.y.resize(kSensorCount);
        for (std::size_t j = 0; j < kSensorCount; ++j)
            frame.y[j] = parse_double(cells[2 + j], row, /*allow_empty=*/true);
        frame.power = parse_double(cells[8], row, false);
        frame.speed = parse_double(cells[9], row, false);
        frame.torque = parse_double(cells[10], row, false);
        frame.air_inlet = parse_double(cells[11], row, false);
        frame.water_cooling = parse_double(cells[12], row, false);
        if (has_yhat) {
            frame.yhat.resize(kSensorCount);
            for (std::size_t j = 0; j < kSensorCount; ++j)
                frame.yhat[j] = parse_double(cells[13 + j], row, true);
        }
        auto [it, inserted] = index.try_emplace(motor, fleet.size());
        if (inserted) {
            fleet.emplace_back();
            fleet.back().motor_id = motor;
            row_numbers.emplace_back();
        }
        fleet[it->second].frames.push_back(std::move(frame));
        row_numbers[it->second].push_back(row);
    }

    for (std::size_t m = 0; m < fleet.size(); ++m) {
        auto& series = fleet[m];
        auto& rows = row_numbers[m];
        std::vector<std::size_t> order(series.frames.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return series.frames[a].timestamp < series.frames[b].timestamp;
        });
        std::vector<SensorFrame> sorted;
        sorted.reserve(series.frames.size());
        std::vector<std::size_t> sorted_rows;
        sorted_rows.reserve(rows.size());
        for (std::size_t i : order) {
            sorted.push_back(std::move(series.frames[i]));
            sorted_rows.push_back(rows[i]);
        }
        series.frames = std::move(sorted);
        for (std::size_t i = 1; i < series.frames.size(); ++i) {
            const std::int64_t dt =
                series.frames[i].timestamp - series.frames[i - 1].timestamp;
            if (dt == 0) {
                throw DataError("row " + std::to_string(sorted_rows[i]) +
                                ": duplicate timestamp for motor " +
                                series.motor_id);
            }
            if (dt > 1) ++series.gap_count;
        }
    }
    return fleet;
}

void write_fleet_csv(const std::filesystem::path& path,
                     std::span<const MotorSeries> fleet) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    bool any_yhat = false;
    for (const auto& series : fleet)
        for (const auto& f : series.frames)
            if (!f.yhat.empty()) any_yhat = true;
    out << (any_yhat ? kHeaderYhat : kHeader) << '\n';

    std::string line;
    for (const auto& series : fleet) {
        for (const auto& f : series.frames) {
            line.clear();
            line += std::to_string(f.timestamp);
            line += ',';
            line += series.motor_id;
            for (std::size_t j = 0; j < kSensorCount; ++j) {
                line += ',';
                format_double(line, j < f.y.size()
                                        ? f.y[j]
                                        : std::numeric_limits<double>::quiet_NaN());
            }
            line += ',';
            format_double(line, f.power);
            line += ',';
            format_double(line, f.speed);
            line += ',';
            format_double(line, f.torque);
            line += ',';
            format_double(line, f.air_inlet);
            line += ',';
            format_double(line, f.water_cooling);
            if (any_yhat) {
                for (std::size_t j = 0; j < kSensorCount; ++j) {
                    line += ',';
                    format_double(line,
                                  j < f.yhat.size()
                                      ? f.yhat[j]
                                      : std::numeric_limits<double>::quiet_NaN());
                }
            }
            line += '\n';
            out << line;
        }
    }
}

void load_drift_annotations(const std::filesystem::path& path,
                            std::vector<MotorSeries>& fleet) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "motor_id,drift_timestamp")
        throw SchemaError("unexpected header in " + path.string() + ": " + line);

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != 2)
            throw DataError("row " + std::to_string(row) + ": expected 2 fields");
        const std::int64_t t = parse_int(cells[1], row);
        bool found = false;
        for (auto& series : fleet) {
            if (series.motor_id != cells[0]) continue;
            found = true;
            if (series.frames.empty() || t <= series.frames.front().timestamp ||
                t >= series.frames.back().timestamp) {
                throw DataError("row " + std::to_string(row) +
                                ": drift time outside series for motor " +
                                cells[0]);
            }
            series.drift_times.push_back(t);
        }
        if (!found)
            throw DataError("row " + std::to_string(row) + ": unknown motor " +
                            cells[0]);
    }
    for (auto& series : fleet)
        std::sort(series.drift_times.begin(), series.drift_times.end());
}

void write_drift_annotations(const std::filesystem::path& path,
                             std::span<const MotorSeries> fleet) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "motor_id,drift_timestamp\n";
    for (const auto& series : fleet)
        for (const std::int64_t t : series.drift_times)
            out << series.motor_id << ',' << t << '\n';
}

DatasetSplit split_dataset(const MotorSeries& series) {
    if (series.frames.empty()) throw DataError("empty series");
    const std::size_t n = series.size();

    std::size_t test_begin;
    if (!series.drift_times.empty()) {
        const std::int64_t first_drift = series.drift_times.front();
        std::size_t drift_idx = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (series.frames[i].timestamp >= first_drift) {
                drift_idx = i;
                break;
            }
        }
        if (drift_idx < static_cast<std::size_t>(kPreDriftBufferSamples)) {
            throw DataError("degenerate split for motor " + series.motor_id +
                            ": drift too close to series start");
        }
        test_begin = drift_idx - static_cast<std::size_t>(kPreDriftBufferSamples);
    } else {
        test_begin = n - n / 4;
    }

    const std::size_t prefix = test_begin;
    if (prefix < 2 || test_begin >= n) {
        throw DataError("degenerate split for motor " + series.motor_id);
    }
    const std::size_t half = prefix / 2;
    DatasetSplit split;
    split.train = {0, half};
    split.validation = {half, prefix};
    split.test = {test_begin, n};
    return split;
}

}  // namespace driftmon
