#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "magbern/core/errors.hpp"

namespace magbern::geometry {

/// Boolean cell grid: cell (i1, i2) is [x0 + i1 h1, x0 + (i1+1) h1) x
/// [y0 + i2 h2, y0 + (i2+1) h2). Optionally a tile of a periodic set.
class SetMask {
public:
    SetMask(int n1, int n2, double h1, double h2, bool periodic = false, double x0 = 0.0, double y0 = 0.0)
        : n1_(n1), n2_(n2), h1_(h1), h2_(h2), x0_(x0), y0_(y0), periodic_(periodic),
          cells_(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2), 0) {
        require(n1 >= 1 && n2 >= 1, "mask grid must be nonempty");
        require(h1 > 0.0 && h2 > 0.0, "mask spacing must be positive");
    }

    [[nodiscard]] int n1() const { return n1_; }
    [[nodiscard]] int n2() const { return n2_; }
    [[nodiscard]] double h1() const { return h1_; }
    [[nodiscard]] double h2() const { return h2_; }
    [[nodiscard]] double x0() const { return x0_; }
    [[nodiscard]] double y0() const { return y0_; }
    [[nodiscard]] bool periodic() const { return periodic_; }
    void set_periodic(bool p) { periodic_ = p; }
    [[nodiscard]] double cell_area() const { return h1_ * h2_; }

    [[nodiscard]] bool at(int i1, int i2) const { return cells_[idx(i1, i2)] != 0; }
    void set(int i1, int i2, bool v) { cells_[idx(i1, i2)] = v ? 1 : 0; }

    [[nodiscard]] std::int64_t count() const {
        std::int64_t c = 0;
        for (auto v : cells_) c += v;
        return c;
    }
    [[nodiscard]] double measure() const { return static_cast<double>(count()) * cell_area(); }

    [[nodiscard]] double center_x1(int i1) const { return x0_ + (i1 + 0.5) * h1_; }
    [[nodiscard]] double center_x2(int i2) const { return y0_ + (i2 + 0.5) * h2_; }

    /// Superset test on equal grids.
    [[nodiscard]] bool subset_of(const SetMask& o) const {
        require(o.n1_ == n1_ && o.n2_ == n2_, "mask grids differ");
        for (std::size_t i = 0; i < cells_.size(); ++i)
            if (cells_[i] && !o.cells_[i]) return false;
        return true;
    }

    /// Plain PBM (P1): width n1 (column = i1), height n2 (row = i2, first
    /// row is i2 = 0), 1 = in the set.
    void write_pbm(std::ostream& os) const {
        os << "P1\n" << n1_ << ' ' << n2_ << '\n';
        for (int i2 = 0; i2 < n2_; ++i2) {
            for (int i1 = 0; i1 < n1_; ++i1) os << (at(i1, i2) ? '1' : '0') << (i1 + 1 < n1_ ? " " : "");
            os << '\n';
        }
    }
    static SetMask read_pbm(std::istream& is, double h1 = 1.0, double h2 = 1.0, bool periodic = false) {
        // Tokenize while dropping # comments.
        std::string tokens;
        std::string line;
        while (std::getline(is, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            tokens += line + ' ';
        }
        std::istringstream ts(tokens);
        std::string magic;
        ts >> magic;
        if (magic != "P1") throw ValidationError("mask file is not a plain PBM (P1) bitmap");
        int w = 0;
        int h = 0;
        if (!(ts >> w >> h) || w < 1 || h < 1) throw ValidationError("malformed PBM dimensions");
        SetMask m(w, h, h1, h2, periodic);
        // P1 pixels may be packed without whitespace.
        int filled = 0;
        char c = 0;
        while (filled < w * h && ts >> c) {
            if (c != '0' && c != '1') throw ValidationError(std::string("unexpected PBM pixel '") + c + "'");
            m.set(filled % w, filled / w, c == '1');
            ++filled;
        }
        if (filled != w * h) throw ValidationError("PBM pixel data is truncated");
        return m;
    }

private:
    [[nodiscard]] std::size_t idx(int i1, int i2) const {
        return static_cast<std::size_t>(i1) * static_cast<std::size_t>(n2_) + static_cast<std::size_t>(i2);
    }

    int n1_;
    int n2_;
    double h1_;
    double h2_;
    double x0_;
    double y0_;
    bool periodic_;
    std::vector<std::uint8_t> cells_;
};

/// Vertical strips: cell column i1 is in the set iff (i1 mod period) < width.
inline SetMask strip_mask(int n1, int n2, double h1, double h2, int width, int period, bool periodic = true) {
    require(period >= 1 && width >= 0 && width <= period, "strip width must lie in [0, period]");
    SetMask m(n1, n2, h1, h2, periodic);
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) m.set(i1, i2, (i1 % period) < width);
    return m;
}

/// Checkerboard of square blocks of `block` cells; the (0,0) block is in S.
inline SetMask checkerboard_mask(int n1, int n2, double h1, double h2, int block, bool periodic = true) {
    require(block >= 1, "checkerboard block must be positive");
    SetMask m(n1, n2, h1, h2, periodic);
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) m.set(i1, i2, ((i1 / block) + (i2 / block)) % 2 == 0);
    return m;
}

/// Complement of the disk |x - c| < radius. By default a cell is in S when
/// its center is outside the disk; with keep_boundary_cells every cell that
/// meets the complement is kept, so the mask contains the true set.
inline SetMask disk_complement_mask(int n1, int n2, double h1, double h2, double c1, double c2, double radius,
                                    double x0 = 0.0, double y0 = 0.0, bool periodic = false,
                                    bool keep_boundary_cells = false) {
    SetMask m(n1, n2, h1, h2, periodic, x0, y0);
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) {
            double dx = std::abs(m.center_x1(i1) - c1);
            double dy = std::abs(m.center_x2(i2) - c2);
            if (keep_boundary_cells) {
                dx += 0.5 * h1;
                dy += 0.5 * h2;
            }
            m.set(i1, i2, dx * dx + dy * dy >= radius * radius);
        }
    return m;
}

}  // namespace magbern::geometry
