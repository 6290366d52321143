#include "nafl/trace.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nafl/error.hpp"

namespace nafl::sim {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::string channel_column(const plant::ChannelInfo& ch, const std::string& suffix) {
    return ch.name + suffix + (ch.is_angle ? "_deg" : "");
}

void append_channels(std::vector<double>& row, const Vector& values, const std::vector<plant::ChannelInfo>& channels) {
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const double v = values(static_cast<Eigen::Index>(i));
        row.push_back(channels[i].is_angle ? v * kRadToDeg : v);
    }
}

void append(std::vector<double>& row, const Vector& values) {
    row.insert(row.end(), values.data(), values.data() + values.size());
}

} // namespace

CsvTable trace_table(const Trace& trace) {
    const bool full = plant::find_plant(trace.plant).full_trace;
    CsvTable table;
    auto& header = table.header;
    header.emplace_back("t");
    for (const auto& ch : trace.states) {
        header.push_back(channel_column(ch, ""));
    }
    if (full) {
        for (const auto& ch : trace.controls) {
            header.push_back(channel_column(ch, "_cmd"));
        }
        for (const auto& ch : trace.controls) {
            header.push_back(channel_column(ch, "_act"));
        }
        for (const auto& out : trace.outputs) {
            header.push_back(out + "r");
        }
    } else {
        for (const auto& ch : trace.controls) {
            header.push_back(channel_column(ch, ""));
        }
    }
    for (const auto& out : trace.outputs) {
        header.push_back("e" + out);
    }
    if (full) {
        for (std::size_t i = 0; i < trace.outputs.size(); ++i) {
            header.push_back("h" + std::to_string(i + 1));
        }
    }
    header.emplace_back("Vs");
    if (full) {
        header.insert(header.end(), {"det_dvdu", "eq40_bound", "pinv_active"});
    }

    table.rows.reserve(trace.records.size());
    for (const auto& r : trace.records) {
        std::vector<double> row;
        row.reserve(header.size());
        row.push_back(r.t);
        append_channels(row, r.state, trace.states);
        append_channels(row, r.commanded, trace.controls);
        if (full) {
            append_channels(row, r.actuators, trace.controls);
            append(row, r.y_ref);
        }
        append(row, r.tracking_error);
        if (full) {
            append(row, r.h);
        }
        row.push_back(r.v_s);
        if (full) {
            row.insert(row.end(), {r.det_dv_du, r.eq40_bound, r.pinv_active ? 1.0 : 0.0});
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::File, "cannot open " + path.string() + " for writing");
    }
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out << (i ? "," : "") << table.header[i];
    }
    out << '\n';
    char buf[32];
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17e", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << '\n';
    }
    out.flush();
    if (!out) {
        throw Error(ErrorKind::File, "write to " + path.string() + " failed");
    }
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
    write_csv(trace_table(trace), path);
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::File, "cannot open " + path.string());
    }
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::File, path.string() + " has no header row");
    }
    {
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            table.header.push_back(cell);
        }
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            double value = 0.0;
            const auto* end = cell.data() + cell.size();
            const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
            if (ec != std::errc() || ptr != end) {
                throw Error(ErrorKind::File, path.string() + ": malformed number '" + cell + "'");
            }
            row.push_back(value);
        }
        if (row.size() != table.header.size()) {
            throw Error(ErrorKind::File, path.string() + ": row width does not match header");
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace nafl::sim
