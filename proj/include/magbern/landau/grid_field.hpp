#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "magbern/core/errors.hpp"

namespace magbern::landau {

using cplx = std::complex<double>;

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;
};

class LandauForm;  // closed-form carrier, see landau_form.hpp

/// Uniform rectangular grid: point (i1, i2) sits at (x0 + i1 h1, y0 + i2 h2).
struct GridGeometry {
    int n1 = 2;
    int n2 = 2;
    double x0 = 0.0;
    double y0 = 0.0;
    double h1 = 1.0;
    double h2 = 1.0;

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2); }
    [[nodiscard]] double cell_area() const { return h1 * h2; }
    [[nodiscard]] std::size_t index(int i1, int i2) const {
        return static_cast<std::size_t>(i1) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(i2);
    }
    [[nodiscard]] Vec2 point(int i1, int i2) const { return {x0 + i1 * h1, y0 + i2 * h2}; }
    void validate() const {
        require(n1 >= 2 && n2 >= 2, "grid needs at least 2 points per axis");
        require(h1 > 0.0 && h2 > 0.0, "grid spacing must be positive");
    }
    /// Square grid covering [c - R, c + R]^2 with spacing at most h.
    static GridGeometry centered(Vec2 c, double radius, double h) {
        require(radius > 0.0 && h > 0.0, "centered grid needs positive radius and spacing");
        const int n = static_cast<int>(std::ceil(2.0 * radius / h)) + 1;
        const double step = 2.0 * radius / (n - 1);
        return {n, n, c.x1 - radius, c.x2 - radius, step, step};
    }
    friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

/// Complex samples on a grid, optionally tagged with the closed form they
/// were sampled from.
class GridField {
public:
    GridField() = default;
    explicit GridField(GridGeometry g) : geo_(g), data_(g.size()) { geo_.validate(); }
    GridField(GridGeometry g, std::vector<cplx> data) : geo_(g), data_(std::move(data)) {
        geo_.validate();
        require(data_.size() == geo_.size(), "GridField payload does not match its geometry");
    }

    static GridField sample(const GridGeometry& g, const std::function<cplx(Vec2)>& f) {
        GridField out(g);
        for (int i1 = 0; i1 < g.n1; ++i1)
            for (int i2 = 0; i2 < g.n2; ++i2) out.data_[g.index(i1, i2)] = f(g.point(i1, i2));
        return out;
    }

    [[nodiscard]] const GridGeometry& geometry() const { return geo_; }
    [[nodiscard]] const std::vector<cplx>& data() const { return data_; }
    [[nodiscard]] std::vector<cplx>& data() { return data_; }
    [[nodiscard]] cplx at(int i1, int i2) const { return data_[geo_.index(i1, i2)]; }
    cplx& at(int i1, int i2) { return data_[geo_.index(i1, i2)]; }

    [[nodiscard]] const std::shared_ptr<const LandauForm>& form() const { return form_; }
    void set_form(std::shared_ptr<const LandauForm> f) { form_ = std::move(f); }

    /// Sum of |f|^2 times cell area; this is the trapezoid rule for fields
    /// that vanish at the boundary.
    [[nodiscard]] double norm2() const {
        double s = 0.0;
        for (const auto& v : data_) s += std::norm(v);
        return s * geo_.cell_area();
    }
    [[nodiscard]] double l1_norm() const {
        double s = 0.0;
        for (const auto& v : data_) s += std::abs(v);
        return s * geo_.cell_area();
    }
    /// Fraction of the squared mass in the outermost `layers` rows/columns.
    [[nodiscard]] double boundary_fraction(int layers = 1) const {
        double edge = 0.0;
        double total = 0.0;
        for (int i1 = 0; i1 < geo_.n1; ++i1)
            for (int i2 = 0; i2 < geo_.n2; ++i2) {
                const double v = std::norm(at(i1, i2));
                total += v;
                if (i1 < layers || i2 < layers || i1 >= geo_.n1 - layers || i2 >= geo_.n2 - layers) edge += v;
            }
        return total > 0.0 ? edge / total : 0.0;
    }

    /// Little-endian header of six float64 (n1, n2, x0, y0, h1, h2), then
    /// row-major (re, im) float64 pairs.
    void write_binary(std::ostream& os) const {
        auto put = [&](double v) {
            static_assert(std::endian::native == std::endian::little, "binary layout assumes little-endian host");
            os.write(reinterpret_cast<const char*>(&v), sizeof v);
        };
        put(geo_.n1);
        put(geo_.n2);
        put(geo_.x0);
        put(geo_.y0);
        put(geo_.h1);
        put(geo_.h2);
        for (const auto& v : data_) {
            put(v.real());
            put(v.imag());
        }
    }
    static GridField read_binary(std::istream& is) {
        auto get = [&]() {
            double v = 0.0;
            is.read(reinterpret_cast<char*>(&v), sizeof v);
            if (!is) throw ValidationError("truncated GridField binary stream");
            return v;
        };
        GridGeometry g;
        g.n1 = static_cast<int>(get());
        g.n2 = static_cast<int>(get());
        g.x0 = get();
        g.y0 = get();
        g.h1 = get();
        g.h2 = get();
        g.validate();
        std::vector<cplx> d(g.size());
        for (auto& v : d) {
            const double re = get();
            v = {re, get()};
        }
        return {g, std::move(d)};
    }
    /// CSV with header "x1,x2,re,im".
    void write_csv(std::ostream& os) const {
        os << "x1,x2,re,im\n";
        os.precision(17);
        for (int i1 = 0; i1 < geo_.n1; ++i1)
            for (int i2 = 0; i2 < geo_.n2; ++i2) {
                const Vec2 p = geo_.point(i1, i2);
                const cplx v = at(i1, i2);
                os << p.x1 << ',' << p.x2 << ',' << v.real() << ',' << v.imag() << '\n';
            }
    }

private:
    GridGeometry geo_;
    std::vector<cplx> data_;
    std::shared_ptr<const LandauForm> form_;
};

}  // namespace magbern::landau
