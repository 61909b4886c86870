#pragma once

// On-resistance lookup table R_on(T_j, I_d) and its inversion to junction
// temperature. Start-up recalibration splits the measured drift into a
// gate-oxide part (predicted per temperature row from the threshold shift) and
// a uniform package offset.

#include "acpc/device.hpp"

#include <iosfwd>
#include <vector>

namespace acpc {

class RonLut {
public:
    RonLut() = default;
    /// grid[row][col] for t_axis[row], i_axis[col]. Throws ConfigError unless
    /// both axes are strictly increasing and every column increases with T_j.
    RonLut(std::vector<double> t_axis, std::vector<double> i_axis, std::vector<std::vector<double>> grid);

    [[nodiscard]] const std::vector<double>& t_axis() const noexcept { return t_axis_; }
    [[nodiscard]] const std::vector<double>& i_axis() const noexcept { return i_axis_; }
    [[nodiscard]] const std::vector<std::vector<double>>& grid() const noexcept { return grid_; }

    /// Uniform package offset, ohm.
    [[nodiscard]] double offset() const noexcept { return offset_; }
    /// Gate-oxide shift per temperature row, ohm.
    [[nodiscard]] const std::vector<double>& oxide_shift() const noexcept { return oxide_; }

    void set_offset(double ohm) noexcept { offset_ = ohm; }
    void set_oxide_shift(std::vector<double> shift);

    /// Effective value at a node including both shifts.
    [[nodiscard]] double node(std::size_t row, std::size_t col) const noexcept {
        return grid_[row][col] + oxide_[row] + offset_;
    }

    /// Bilinear lookup with clamping to the grid.
    [[nodiscard]] double value(double t_j, double i_d) const noexcept;

    bool operator==(const RonLut&) const = default;

private:
    std::vector<double> t_axis_;
    std::vector<double> i_axis_;
    std::vector<std::vector<double>> grid_;
    std::vector<double> oxide_;
    double offset_ = 0.0;
};

/// Default axes: 25..175 C step 25 and 50..400 A step 50.
[[nodiscard]] std::vector<double> default_t_axis();
[[nodiscard]] std::vector<double> default_i_axis();

/// Table from the device model at gate voltage v_gs.
[[nodiscard]] RonLut build_lut(const DeviceState& dev, double v_gs, std::vector<double> t_axis = default_t_axis(),
                               std::vector<double> i_axis = default_i_axis());

struct TjEstimate {
    double t_j = 0.0;
    bool out_of_grid = false;
};

[[nodiscard]] TjEstimate estimate_tj(double r_on, double i_d, const RonLut& lut) noexcept;

/// Start-up recalibration against a table built from the fresh device.
/// Throws AmbientMismatch when the measured value lies below the oxide-shifted
/// prediction by more than rel_tolerance of it.
[[nodiscard]] RonLut recalibrate_lut(const RonLut& lut, double r_on_measured_ambient, double t_ambient, double i_cal,
                                     double dv_th, const DeviceState& dev, double rel_tolerance = 0.01);

void write_lut_csv(std::ostream& os, const RonLut& lut);
/// Reads a table written by write_lut_csv; shifts are folded into the grid.
[[nodiscard]] RonLut read_lut_csv(std::istream& is);

}  // namespace acpc
