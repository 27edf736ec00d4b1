#include "hs/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace hs {

Grid::Grid(int dim_, Vec origin_, double h_, std::array<int, 3> extents_)
    : dim(dim_), origin(origin_), h(h_), extents(extents_) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("grid: dim must be 2 or 3");
    if (!(h > 0)) throw std::invalid_argument("grid: spacing must be positive");
    if (dim == 2) extents[2] = 1;
    for (int a = 0; a < dim; ++a)
        if (extents[a] < 4) throw std::invalid_argument("grid: need at least 4 nodes per axis");
}

void Grid::locate(const Vec& x, int cell[3], double frac[3]) const {
    for (int a = 0; a < 3; ++a) {
        if (a >= dim) { cell[a] = 0; frac[a] = 0.0; continue; }
        double s = (x[a] - origin[a]) / h;
        int c = int(std::floor(s));
        c = std::clamp(c, 0, extents[a] - 2);
        cell[a] = c;
        frac[a] = std::clamp(s - c, 0.0, 1.0);
    }
}

double GridField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double GridField::max_value() const {
    double m = -1e300;
    for (double v : values) m = std::max(m, v);
    return m;
}

double GridField::interp(const Vec& x) const {
    int c[3];
    double f[3];
    grid.locate(x, c, f);
    if (grid.dim == 2) {
        double v00 = at(c[0], c[1]), v10 = at(c[0] + 1, c[1]);
        double v01 = at(c[0], c[1] + 1), v11 = at(c[0] + 1, c[1] + 1);
        double v0 = v00 + f[0] * (v10 - v00);
        double v1 = v01 + f[0] * (v11 - v01);
        return v0 + f[1] * (v1 - v0);
    }
    double v = 0.0;
    for (int dk = 0; dk < 2; ++dk) {
        double wk = dk ? f[2] : 1 - f[2];
        for (int dj = 0; dj < 2; ++dj) {
            double wj = dj ? f[1] : 1 - f[1];
            for (int di = 0; di < 2; ++di) {
                double wi = di ? f[0] : 1 - f[0];
                v += wi * wj * wk * at(c[0] + di, c[1] + dj, c[2] + dk);
            }
        }
    }
    return v;
}

Vec GridField::gradient_at(int i, int j, int k) const {
    Vec g{0, 0, 0};
    int ijk[3] = {i, j, k};
    for (int a = 0; a < grid.dim; ++a) {
        int lo[3] = {ijk[0], ijk[1], ijk[2]};
        int hi[3] = {ijk[0], ijk[1], ijk[2]};
        lo[a] = std::max(ijk[a] - 1, 0);
        hi[a] = std::min(ijk[a] + 1, grid.extents[a] - 1);
        double span = (hi[a] - lo[a]) * grid.h;
        g[a] = span > 0 ? (at(hi[0], hi[1], hi[2]) - at(lo[0], lo[1], lo[2])) / span : 0.0;
    }
    return g;
}

void GridField::validate(const std::string& label) const {
    if (values.size() != grid.size())
        throw std::runtime_error(label + ": value count does not match grid");
    for (double v : values) {
        if (!std::isfinite(v)) throw std::runtime_error(label + ": non-finite value");
        if (non_negative && v < 0) throw std::runtime_error(label + ": negative value in non-negative field");
    }
}

void write_field(const GridField& f, const std::string& path, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_field: cannot open " + path);
    out.precision(17);
    out << "# hslab field v1\n";
    out << "dim " << f.grid.dim << "\n";
    out << "origin " << f.grid.origin[0] << " " << f.grid.origin[1] << " " << f.grid.origin[2] << "\n";
    out << "spacing " << f.grid.h << "\n";
    out << "extents " << f.grid.extents[0] << " " << f.grid.extents[1] << " " << f.grid.extents[2] << "\n";
    out << "time " << f.time << "\n";
    out << "format " << (binary ? "binary" : "ascii") << "\n";
    if (binary) {
        out.write(reinterpret_cast<const char*>(f.values.data()),
                  std::streamsize(f.values.size() * sizeof(double)));
    } else {
        for (double v : f.values) out << v << "\n";
    }
}

GridField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field: cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line.rfind("# hslab field", 0) != 0) throw std::runtime_error("read_field: bad magic");
    int dim = 0;
    Vec origin{0, 0, 0};
    double h = 0, t = 0;
    std::array<int, 3> ext{0, 0, 1};
    std::string format = "ascii";
    for (int n = 0; n < 6; ++n) {
        std::getline(in, line);
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "dim") ls >> dim;
        else if (key == "origin") ls >> origin[0] >> origin[1] >> origin[2];
        else if (key == "spacing") ls >> h;
        else if (key == "extents") ls >> ext[0] >> ext[1] >> ext[2];
        else if (key == "time") ls >> t;
        else if (key == "format") ls >> format;
        else throw std::runtime_error("read_field: unknown header key " + key);
    }
    GridField f(Grid(dim, origin, h, ext));
    f.time = t;
    if (format == "binary") {
        in.read(reinterpret_cast<char*>(f.values.data()),
                std::streamsize(f.values.size() * sizeof(double)));
        if (!in) throw std::runtime_error("read_field: truncated payload");
    } else {
        // strtod, not stream extraction: hit-time dumps carry inf tokens.
        std::string tok;
        for (double& v : f.values) {
            if (!(in >> tok)) throw std::runtime_error("read_field: truncated payload");
            char* end = nullptr;
            v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str())
                throw std::runtime_error("read_field: bad value '" + tok + "'");
        }
    }
    return f;
}

namespace {

// Ball offset stencils keyed by (pitch, quantized radius bucket).
const std::vector<Vec>& ball_stencil(int dim, double pitch, double radius) {
    static std::map<std::pair<double, long>, std::vector<Vec>> cache[4];
    double quantum = pitch / 2.0;
    long bucket = long(std::floor(radius / quantum + 1e-12));
    auto key = std::make_pair(pitch, bucket);
    auto& slot = cache[dim];
    auto it = slot.find(key);
    if (it != slot.end()) return it->second;
    double rq = double(bucket) * quantum;
    std::vector<Vec> offs;
    int n = int(std::floor(rq / pitch + 1e-12));
    int kz = dim == 3 ? n : 0;
    for (int k = -kz; k <= kz; ++k)
        for (int j = -n; j <= n; ++j)
            for (int i = -n; i <= n; ++i) {
                Vec o{pitch * i, pitch * j, pitch * k};
                if (norm(o) <= rq + 1e-12 * quantum) offs.push_back(o);
            }
    return slot.emplace(key, std::move(offs)).first->second;
}

double ball_extreme(const GridField& f, const Vec& c, double radius, bool take_max) {
    if (!(radius >= 0.0)) throw std::invalid_argument("ball extremum: radius must be >= 0");
    double best = f.interp(c);
    // Base pitch h/2; for balls spanning many cells, coarsen so the sample
    // count stays bounded (the exact axis tips below are always kept).
    double cap = f.grid.dim == 3 ? radius / 8.0 : radius / 16.0;
    double pitch = std::max(f.grid.h / 2.0, cap);
    for (const Vec& o : ball_stencil(f.grid.dim, pitch, radius)) {
        double v = f.interp(c + o);
        best = take_max ? std::max(best, v) : std::min(best, v);
    }
    for (int a = 0; a < f.grid.dim; ++a)
        for (int s = -1; s <= 1; s += 2) {
            Vec tip = c;
            tip[a] += s * radius;
            double v = f.interp(tip);
            best = take_max ? std::max(best, v) : std::min(best, v);
        }
    return best;
}

}  // namespace

double ball_max(const GridField& f, const Vec& center, double radius) {
    return ball_extreme(f, center, radius, true);
}

double ball_min(const GridField& f, const Vec& center, double radius) {
    return ball_extreme(f, center, radius, false);
}

}  // namespace hs
