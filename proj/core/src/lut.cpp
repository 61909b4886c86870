#include "acpc/lut.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace acpc {

namespace {

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (!(v[k] > v[k - 1])) return false;
    }
    return true;
}

// Bracketing segment and weight for x on a sorted axis, clamped.
struct Bracket {
    std::size_t lo = 0;
    double w = 0.0;
    bool clamped = false;
};

Bracket bracket(const std::vector<double>& axis, double x) noexcept {
    if (axis.size() == 1) return {0, 0.0, x != axis[0]};
    if (x <= axis.front()) return {0, 0.0, x < axis.front()};
    if (x >= axis.back()) return {axis.size() - 2, 1.0, x > axis.back()};
    const auto it = std::upper_bound(axis.begin(), axis.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - axis.begin());
    const std::size_t lo = hi - 1;
    return {lo, (x - axis[lo]) / (axis[hi] - axis[lo]), false};
}

double row_at(const RonLut& lut, std::size_t row, const Bracket& bi) noexcept {
    if (lut.i_axis().size() == 1) return lut.node(row, 0);
    return lut.node(row, bi.lo) + bi.w * (lut.node(row, bi.lo + 1) - lut.node(row, bi.lo));
}

}  // namespace

RonLut::RonLut(std::vector<double> t_axis, std::vector<double> i_axis, std::vector<std::vector<double>> grid)
    : t_axis_(std::move(t_axis)), i_axis_(std::move(i_axis)), grid_(std::move(grid)), oxide_(t_axis_.size(), 0.0) {
    if (t_axis_.size() < 2 || !strictly_increasing(t_axis_)) throw ConfigError("lut.t_axis", "needs at least two strictly increasing entries");
    if (i_axis_.empty() || !strictly_increasing(i_axis_)) throw ConfigError("lut.i_axis", "must be strictly increasing");
    if (grid_.size() != t_axis_.size()) throw ConfigError("lut.grid", "row count differs from the T_j axis");
    for (const auto& row : grid_) {
        if (row.size() != i_axis_.size()) throw ConfigError("lut.grid", "column count differs from the I_d axis");
    }
    for (std::size_t c = 0; c < i_axis_.size(); ++c) {
        for (std::size_t r = 1; r < t_axis_.size(); ++r) {
            if (!(grid_[r][c] > grid_[r - 1][c])) throw ConfigError("lut.grid", "R_on must increase with T_j");
        }
    }
}

void RonLut::set_oxide_shift(std::vector<double> shift) {
    if (shift.size() != t_axis_.size()) throw Error("oxide shift needs one entry per T_j row");
    oxide_ = std::move(shift);
}

double RonLut::value(double t_j, double i_d) const noexcept {
    const auto bt = bracket(t_axis_, t_j);
    const auto bi = bracket(i_axis_, i_d);
    const double a = row_at(*this, bt.lo, bi);
    const double b = row_at(*this, bt.lo + 1, bi);
    return a + bt.w * (b - a);
}

std::vector<double> default_t_axis() { return {25, 50, 75, 100, 125, 150, 175}; }
std::vector<double> default_i_axis() { return {50, 100, 150, 200, 250, 300, 350, 400}; }

RonLut build_lut(const DeviceState& dev, double v_gs, std::vector<double> t_axis, std::vector<double> i_axis) {
    std::vector<std::vector<double>> grid(t_axis.size(), std::vector<double>(i_axis.size()));
    for (std::size_t r = 0; r < t_axis.size(); ++r) {
        for (std::size_t c = 0; c < i_axis.size(); ++c) grid[r][c] = r_on(dev, t_axis[r], i_axis[c], v_gs);
    }
    return RonLut(std::move(t_axis), std::move(i_axis), std::move(grid));
}

TjEstimate estimate_tj(double r, double i_d, const RonLut& lut) noexcept {
    const auto bi = bracket(lut.i_axis(), i_d);
    const auto& ts = lut.t_axis();
    TjEstimate e;
    e.out_of_grid = bi.clamped;
    double prev = row_at(lut, 0, bi);
    if (r <= prev) {
        e.t_j = ts.front();
        e.out_of_grid = e.out_of_grid || r < prev;
        return e;
    }
    for (std::size_t k = 1; k < ts.size(); ++k) {
        const double cur = row_at(lut, k, bi);
        if (r <= cur) {
            e.t_j = ts[k - 1] + (r - prev) / (cur - prev) * (ts[k] - ts[k - 1]);
            return e;
        }
        prev = cur;
    }
    e.t_j = ts.back();
    e.out_of_grid = true;
    return e;
}

RonLut recalibrate_lut(const RonLut& lut, double r_meas, double t_ambient, double i_cal, double dv_th,
                       const DeviceState& dev, double rel_tolerance) {
    const auto& p = dev.params;
    std::vector<double> oxide(lut.t_axis().size());
    const auto channel_shift = [&](double t) {
        const double od = p.v_gs_on - p.v_th0 - p.rho_vth * (t - p.t0);
        if (od - dv_th <= 0.0) throw OverdriveCollapse("threshold shift leaves no gate overdrive");
        return p.k_ch / (od - dv_th) - p.k_ch / od;
    };
    for (std::size_t r = 0; r < oxide.size(); ++r) oxide[r] = channel_shift(lut.t_axis()[r]);

    RonLut out = lut;
    out.set_offset(0.0);
    out.set_oxide_shift(oxide);
    const double predicted = out.value(t_ambient, i_cal);
    const double offset = r_meas - predicted;
    if (offset < -rel_tolerance * predicted) throw AmbientMismatch("ambient on-resistance below the recalibrated prediction");
    out.set_offset(offset);
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse(const std::string& s) {
    double v = 0.0;
    const auto b = s.data(), e = s.data() + s.size();
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) throw ConfigError("lut.csv", "bad number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        out.push_back(cell);
    }
    return out;
}

}  // namespace

void write_lut_csv(std::ostream& os, const RonLut& lut) {
    os << "t_j_c";
    for (double i : lut.i_axis()) os << ',' << fmt(i);
    os << '\n';
    for (std::size_t r = 0; r < lut.t_axis().size(); ++r) {
        os << fmt(lut.t_axis()[r]);
        for (std::size_t c = 0; c < lut.i_axis().size(); ++c) os << ',' << fmt(lut.node(r, c));
        os << '\n';
    }
}

RonLut read_lut_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("lut.csv", "empty input");
    const auto header = split(line);
    if (header.size() < 2) throw ConfigError("lut.csv", "header needs at least one current column");
    std::vector<double> i_axis;
    for (std::size_t k = 1; k < header.size(); ++k) i_axis.push_back(parse(header[k]));
    std::vector<double> t_axis;
    std::vector<std::vector<double>> grid;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) throw ConfigError("lut.csv", "row width differs from the header");
        t_axis.push_back(parse(cells[0]));
        std::vector<double> row;
        for (std::size_t k = 1; k < cells.size(); ++k) row.push_back(parse(cells[k]));
        grid.push_back(std::move(row));
    }
    return RonLut(std::move(t_axis), std::move(i_axis), std::move(grid));
}

}  // namespace acpc
