#include "modalkit/snapshots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "modalkit/errors.hpp"

namespace modalkit {

namespace {

constexpr const char* kModule = "snapshots";
constexpr double kUniformityTol = 1e-3;  // 0.1% of the median step

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t row) {
    if (cell.empty())
        throw MalformedData(kModule, path + ": empty cell at data row " + std::to_string(row));
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
        throw MalformedData(kModule, path + ": bad cell '" + cell + "' at data row " +
                                         std::to_string(row));
    return v;
}

}  // namespace

TimeSeries ingest_csv(const std::string& path, const RoleMap& role_map) {
    std::ifstream in(path);
    if (!in) throw IoError(kModule, "cannot open " + path);

    std::string header;
    if (!std::getline(in, header)) throw MalformedData(kModule, path + ": empty file");
    if (!header.empty() && header.back() == '\r') header.pop_back();

    const auto names = split_csv_line(header);
    if (names.size() < 2 || names.front() != "t")
        throw SchemaMismatch(kModule, path + ": header must be t,<name1>,...");

    std::set<std::string> seen;
    for (std::size_t c = 1; c < names.size(); ++c) {
        if (!seen.insert(names[c]).second)
            throw SchemaMismatch(kModule, path + ": duplicate channel name " + names[c]);
        if (!role_map.count(names[c]))
            throw SchemaMismatch(kModule,
                                 path + ": channel " + names[c] + " missing from role map");
    }
    for (const auto& [name, role] : role_map) {
        (void)role;
        if (!seen.count(name))
            throw SchemaMismatch(kModule, path + ": role map names unknown channel " + name);
    }

    std::vector<double> times;
    std::vector<std::vector<double>> columns(names.size() - 1);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        const auto cells = split_csv_line(line);
        if (cells.size() != names.size())
            throw MalformedData(kModule, path + ": row " + std::to_string(row) + " has " +
                                             std::to_string(cells.size()) + " cells, expected " +
                                             std::to_string(names.size()));
        times.push_back(parse_cell(cells[0], path, row));
        for (std::size_t c = 1; c < cells.size(); ++c)
            columns[c - 1].push_back(parse_cell(cells[c], path, row));
    }
    const std::size_t n = times.size();
    if (n < 2) throw MalformedData(kModule, path + ": need at least 2 data rows");

    std::vector<double> diffs(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) diffs[j] = times[j + 1] - times[j];
    std::vector<double> sorted = diffs;
    std::sort(sorted.begin(), sorted.end());
    const double dt = sorted.size() % 2 == 1
                          ? sorted[sorted.size() / 2]
                          : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    if (!(dt > 0.0)) throw IrregularSampling(kModule, path + ": non-increasing time column");
    for (std::size_t j = 0; j < diffs.size(); ++j) {
        if (std::abs(diffs[j] - dt) > kUniformityTol * dt)
            throw IrregularSampling(kModule, path + ": step " + std::to_string(j + 1) +
                                                 " deviates from dt by more than 0.1%");
    }

    TimeSeries series;
    series.dt = dt;
    series.t0 = times.front();
    for (std::size_t c = 1; c < names.size(); ++c) {
        Channel ch;
        ch.name = names[c];
        ch.role = role_map.at(names[c]);
        ch.values = Eigen::Map<const Eigen::VectorXd>(columns[c - 1].data(),
                                                      static_cast<Eigen::Index>(n));
        series.channels.push_back(std::move(ch));
    }
    return series;
}

void write_csv(const std::string& path, const TimeSeries& series) {
    std::ofstream out(path);
    if (!out) throw IoError(kModule, "cannot write " + path);
    out << "t";
    for (const auto& ch : series.channels) out << "," << ch.name;
    out << "\n";
    const Eigen::Index n = series.length();
    char buf[40];
    for (Eigen::Index j = 0; j < n; ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", series.t0 + series.dt * static_cast<double>(j));
        out << buf;
        for (const auto& ch : series.channels) {
            std::snprintf(buf, sizeof(buf), "%.17g", ch.values(j));
            out << "," << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError(kModule, "write failed for " + path);
}

Eigen::MatrixXd hankel_stack(const TimeSeries& series, int s, ChannelRole role) {
    const Eigen::Index n = series.length();
    if (s < 1 || s > n - 1)
        throw InvalidStacking(kModule, "shift count s=" + std::to_string(s) +
                                           " outside [1, n-1] for n=" + std::to_string(n));
    std::vector<const Channel*> picked;
    for (const auto& ch : series.channels)
        if (ch.role == role) picked.push_back(&ch);
    if (picked.empty()) throw EmptyRole(kModule, "no channel with the requested role");

    const Eigen::Index c = static_cast<Eigen::Index>(picked.size());
    const Eigen::Index cols = n - s + 1;
    Eigen::MatrixXd out(c * s, cols);
    for (int d = 0; d < s; ++d)
        for (Eigen::Index i = 0; i < c; ++i)
            out.row(static_cast<Eigen::Index>(d) * c + i) =
                picked[i]->values.segment(d, cols).transpose();
    return out;
}

SnapshotMatrices build_pairs(const TimeSeries& series, int s) {
    const Eigen::Index n = series.length();
    if (n - s < 2)
        throw TooFewSnapshots(kModule, "n-s=" + std::to_string(n - s) + " leaves too few columns");
    const Eigen::MatrixXd stacked = hankel_stack(series, s, ChannelRole::State);
    const Eigen::Index cols = n - s;

    SnapshotMatrices snap;
    snap.X1 = stacked.leftCols(cols);
    snap.X2 = stacked.rightCols(cols);
    snap.m = series.count_role(ChannelRole::State);
    snap.e = series.count_role(ChannelRole::Input);
    snap.s = s;
    snap.dt = series.dt;
    if (snap.e > 0) {
        const Eigen::MatrixXd input_stacked = hankel_stack(series, s, ChannelRole::Input);
        snap.U1 = input_stacked.leftCols(cols);
    }
    return snap;
}

}  // namespace modalkit
