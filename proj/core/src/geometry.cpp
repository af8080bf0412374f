// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smashlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace smashlab {

namespace {

double norm(Point const& p)
{
    return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
}

Point read_point(nlohmann::json const& j, int dim, char const* what)
{
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
    {
        std::ostringstream os;
        os << "shape: '" << what << "' must be an array of " << dim
           << " numbers";
        throw ConfigError(os.str());
    }
    Point p{0, 0, 0};
    for (int a = 0; a < dim; ++a)
    {
        if (!j[a].is_number())
            throw ConfigError(std::string("shape: '") + what
                              + "' must contain numbers");
        p[a] = j[a].get<double>();
    }
    return p;
}

nlohmann::json write_point(Point const& p, int dim)
{
    auto arr = nlohmann::json::array();
    for (int a = 0; a < dim; ++a)
        arr.push_back(p[a]);
    return arr;
}

template<class... Ts>
struct Overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

ShapeExpr make_node(int dim, decltype(ShapeNode::node) node)
{
    auto n = std::make_shared<ShapeNode>();
    n->dim = dim;
    n->node = std::move(node);
    return n;
}

int common_dim(std::vector<ShapeExpr> const& parts)
{
    if (parts.empty())
        throw ConfigError("shape: union/intersection needs at least one part");
    int const d = parts.front()->dim;
    for (auto const& p : parts)
    {
        if (p->dim != d)
            throw ConfigError("shape: mixed dimensions in one expression");
    }
    return d;
}

//---------------------------------------------------------------------------//
// 1D squared distance transform (Felzenszwalb & Huttenlocher).
void distance_transform_1d(std::vector<double>& f,
                           std::vector<double>& d,
                           std::vector<long>& v,
                           std::vector<double>& z)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto const n = static_cast<long>(f.size());
    long k = -1;
    for (long q = 0; q < n; ++q)
    {
        if (f[q] == inf)
            continue;
        auto const fq = f[q] + static_cast<double>(q * q);
        while (k >= 0)
        {
            double const s
                = (fq - (f[v[k]] + static_cast<double>(v[k] * v[k])))
                  / (2.0 * static_cast<double>(q - v[k]));
            if (s <= z[k])
            {
                --k;
                continue;
            }
            break;
        }
        ++k;
        v[k] = q;
        z[k] = (k == 0) ? -inf
                        : (fq - (f[v[k - 1]]
                                 + static_cast<double>(v[k - 1] * v[k - 1])))
                              / (2.0 * static_cast<double>(q - v[k - 1]));
        z[k + 1] = inf;
    }
    if (k < 0)
    {
        std::fill(d.begin(), d.begin() + n, inf);
        return;
    }
    long j = 0;
    for (long q = 0; q < n; ++q)
    {
        while (z[j + 1] < static_cast<double>(q))
            ++j;
        double const diff = static_cast<double>(q - v[j]);
        d[q] = diff * diff + f[v[j]];
    }
}

//! Run the separable transform in place over a dense box of given extents.
void distance_transform(std::vector<double>& f,
                        std::array<long, 3> const& n,
                        int dim)
{
    long const maxn = *std::max_element(n.begin(), n.end());
    std::vector<double> line(static_cast<std::size_t>(maxn));
    std::vector<double> out(static_cast<std::size_t>(maxn));
    std::vector<long> v(static_cast<std::size_t>(maxn));
    std::vector<double> z(static_cast<std::size_t>(maxn) + 1);
    std::array<long, 3> const stride{1, n[0], n[0] * n[1]};
    for (int axis = 0; axis < dim; ++axis)
    {
        int const a1 = (axis + 1) % 3;
        int const a2 = (axis + 2) % 3;
        line.resize(static_cast<std::size_t>(n[axis]));
        out.resize(static_cast<std::size_t>(n[axis]));
        for (long i2 = 0; i2 < n[a2]; ++i2)
        {
            for (long i1 = 0; i1 < n[a1]; ++i1)
            {
                long const base = i1 * stride[a1] + i2 * stride[a2];
                for (long q = 0; q < n[axis]; ++q)
                    line[q] = f[base + q * stride[axis]];
                distance_transform_1d(line, out, v, z);
                for (long q = 0; q < n[axis]; ++q)
                    f[base + q * stride[axis]] = out[q];
            }
        }
    }
}

}  // namespace

//---------------------------------------------------------------------------//
// Isometries
//---------------------------------------------------------------------------//

IsometryElem IsometryElem::identity(int dim)
{
    IsometryElem e;
    e.dim = dim;
    return e;
}

std::array<long, 3> IsometryElem::apply(std::array<long, 3> const& v) const
{
    std::array<long, 3> r{0, 0, 0};
    for (int i = 0; i < dim; ++i)
        r[i] = sign[i] * v[perm[i]];
    return r;
}

Point IsometryElem::apply(Point const& v) const
{
    Point r{0, 0, 0};
    for (int i = 0; i < dim; ++i)
        r[i] = sign[i] * v[perm[i]];
    return r;
}

IsometryElem IsometryElem::compose(IsometryElem const& other) const
{
    // (this(other v))_i = sign_i * (other v)_{perm_i}
    //                   = sign_i * other.sign_{perm_i} * v_{other.perm_{perm_i}}
    IsometryElem r;
    r.dim = dim;
    for (int i = 0; i < dim; ++i)
    {
        r.perm[i] = other.perm[perm[i]];
        r.sign[i] = sign[i] * other.sign[perm[i]];
    }
    return r;
}

IsometryElem IsometryElem::inverse() const
{
    // v = U^{-1} w: w_i = s_i v_{p_i}  =>  v_{p_i} = s_i w_i
    IsometryElem r;
    r.dim = dim;
    for (int i = 0; i < dim; ++i)
    {
        r.perm[perm[i]] = i;
        r.sign[perm[i]] = sign[i];
    }
    return r;
}

std::vector<IsometryElem> cubic_isometries(int dim)
{
    if (dim < 1 || dim > 3)
        throw ConfigError("cubic_isometries: dimension must be 1, 2 or 3");
    std::vector<IsometryElem> out;
    std::array<int, 3> p{0, 1, 2};
    do
    {
        for (int mask = 0; mask < (1 << dim); ++mask)
        {
            IsometryElem e = IsometryElem::identity(dim);
            for (int i = 0; i < dim; ++i)
            {
                e.perm[i] = p[i];
                e.sign[i] = (mask >> i) & 1 ? -1 : 1;
            }
            out.push_back(e);
        }
    } while (std::next_permutation(p.begin(), p.begin() + dim));
    return out;
}

int cubic_group_order(int dim)
{
    int f = 1;
    for (int i = 2; i <= dim; ++i)
        f *= i;
    return (1 << dim) * f;
}

//---------------------------------------------------------------------------//
// Shapes
//---------------------------------------------------------------------------//

ShapeExpr make_ball(int dim, Point center, double radius)
{
    if (!(radius > 0))
        throw ConfigError("shape: ball radius must be positive");
    return make_node(dim, ShapeNode::Ball{center, radius});
}

ShapeExpr make_box(int dim, Point lo, Point hi)
{
    for (int a = 0; a < dim; ++a)
    {
        if (!(hi[a] > lo[a]))
            throw ConfigError("shape: box must have nonempty interior");
    }
    return make_node(dim, ShapeNode::Box{lo, hi});
}

ShapeExpr make_union(std::vector<ShapeExpr> parts)
{
    int const d = common_dim(parts);
    return make_node(d, ShapeNode::Union{std::move(parts)});
}

ShapeExpr make_intersection(std::vector<ShapeExpr> parts)
{
    int const d = common_dim(parts);
    return make_node(d, ShapeNode::Intersection{std::move(parts)});
}

ShapeExpr make_difference(ShapeExpr keep, ShapeExpr remove)
{
    if (keep->dim != remove->dim)
        throw ConfigError("shape: mixed dimensions in difference");
    int const d = keep->dim;
    return make_node(d, ShapeNode::Difference{std::move(keep), std::move(remove)});
}

ShapeExpr make_translate(ShapeExpr of, Point by)
{
    int const d = of->dim;
    return make_node(d, ShapeNode::Translate{by, std::move(of)});
}

ShapeExpr make_isometry(ShapeExpr of, IsometryElem element, Point about)
{
    int const d = of->dim;
    if (element.dim != d)
        throw ConfigError("shape: isometry dimension mismatch");
    return make_node(d, ShapeNode::Isometry{element, about, std::move(of)});
}

ShapeExpr make_empty(int dim)
{
    return make_node(dim, ShapeNode::Union{});
}

bool contains(ShapeExpr const& s, Point const& p)
{
    int const d = s->dim;
    return std::visit(
        Overloaded{
            [&](ShapeNode::Ball const& b) {
                double r2 = 0;
                for (int a = 0; a < d; ++a)
                    r2 += (p[a] - b.center[a]) * (p[a] - b.center[a]);
                return r2 < b.radius * b.radius;
            },
            [&](ShapeNode::Box const& b) {
                for (int a = 0; a < d; ++a)
                {
                    if (!(p[a] > b.lo[a] && p[a] < b.hi[a]))
                        return false;
                }
                return true;
            },
            [&](ShapeNode::Union const& u) {
                return std::any_of(u.parts.begin(),
                                   u.parts.end(),
                                   [&](auto const& c) { return contains(c, p); });
            },
            [&](ShapeNode::Intersection const& u) {
                return std::all_of(u.parts.begin(),
                                   u.parts.end(),
                                   [&](auto const& c) { return contains(c, p); });
            },
            [&](ShapeNode::Difference const& df) {
                // open minus closed: points on the removed set's boundary
                // are kept, which is a null set for this algebra
                return contains(df.keep, p) && !contains(df.remove, p);
            },
            [&](ShapeNode::Translate const& t) {
                Point q = p;
                for (int a = 0; a < d; ++a)
                    q[a] -= t.by[a];
                return contains(t.of, q);
            },
            [&](ShapeNode::Isometry const& iso) {
                // p = U(q - x) + x  =>  q = U^{-1}(p - x) + x
                Point rel{0, 0, 0};
                for (int a = 0; a < d; ++a)
                    rel[a] = p[a] - iso.about[a];
                Point q = iso.element.inverse().apply(rel);
                for (int a = 0; a < d; ++a)
                    q[a] += iso.about[a];
                return contains(iso.of, q);
            },
        },
        s->node);
}

RealBox bounding_box(ShapeExpr const& s)
{
    int const d = s->dim;
    auto hull = [d](RealBox a, RealBox const& b) {
        if (a.empty)
            return b;
        if (b.empty)
            return a;
        for (int i = 0; i < d; ++i)
        {
            a.lo[i] = std::min(a.lo[i], b.lo[i]);
            a.hi[i] = std::max(a.hi[i], b.hi[i]);
        }
        return a;
    };
    return std::visit(
        Overloaded{
            [&](ShapeNode::Ball const& b) {
                RealBox r;
                r.empty = false;
                for (int a = 0; a < d; ++a)
                {
                    r.lo[a] = b.center[a] - b.radius;
                    r.hi[a] = b.center[a] + b.radius;
                }
                return r;
            },
            [&](ShapeNode::Box const& b) {
                return RealBox{b.lo, b.hi, false};
            },
            [&](ShapeNode::Union const& u) {
                RealBox r;
                for (auto const& c : u.parts)
                    r = hull(r, bounding_box(c));
                return r;
            },
            [&](ShapeNode::Intersection const& u) {
                RealBox r = bounding_box(u.parts.front());
                for (auto const& c : u.parts)
                {
                    RealBox const b = bounding_box(c);
                    if (b.empty || r.empty)
                        return RealBox{};
                    for (int a = 0; a < d; ++a)
                    {
                        r.lo[a] = std::max(r.lo[a], b.lo[a]);
                        r.hi[a] = std::min(r.hi[a], b.hi[a]);
                        if (r.hi[a] <= r.lo[a])
                            return RealBox{};
                    }
                }
                return r;
            },
            [&](ShapeNode::Difference const& df) {
                return bounding_box(df.keep);
            },
            [&](ShapeNode::Translate const& t) {
                RealBox r = bounding_box(t.of);
                for (int a = 0; a < d; ++a)
                {
                    r.lo[a] += t.by[a];
                    r.hi[a] += t.by[a];
                }
                return r;
            },
            [&](ShapeNode::Isometry const& iso) {
                RealBox const b = bounding_box(iso.of);
                if (b.empty)
                    return b;
                Point rlo{0, 0, 0}, rhi{0, 0, 0};
                for (int a = 0; a < d; ++a)
                {
                    rlo[a] = b.lo[a] - iso.about[a];
                    rhi[a] = b.hi[a] - iso.about[a];
                }
                // signed permutations map boxes to boxes
                Point const p = iso.element.apply(rlo);
                Point const q = iso.element.apply(rhi);
                RealBox r;
                r.empty = false;
                for (int a = 0; a < d; ++a)
                {
                    r.lo[a] = std::min(p[a], q[a]) + iso.about[a];
                    r.hi[a] = std::max(p[a], q[a]) + iso.about[a];
                }
                return r;
            },
        },
        s->node);
}

double radius_about_origin(ShapeExpr const& s)
{
    int const d = s->dim;
    return std::visit(
        Overloaded{
            [&](ShapeNode::Ball const& b) { return norm(b.center) + b.radius; },
            [&](ShapeNode::Box const& b) {
                double r2 = 0;
                for (int a = 0; a < d; ++a)
                {
                    double const m = std::max(std::abs(b.lo[a]), std::abs(b.hi[a]));
                    r2 += m * m;
                }
                return std::sqrt(r2);
            },
            [&](ShapeNode::Union const& u) {
                double r = 0;
                for (auto const& c : u.parts)
                    r = std::max(r, radius_about_origin(c));
                return r;
            },
            [&](ShapeNode::Intersection const& u) {
                double r = std::numeric_limits<double>::infinity();
                for (auto const& c : u.parts)
                    r = std::min(r, radius_about_origin(c));
                return r;
            },
            [&](ShapeNode::Difference const& df) {
                return radius_about_origin(df.keep);
            },
            [&](ShapeNode::Translate const& t) {
                return radius_about_origin(t.of) + norm(t.by);
            },
            [&](ShapeNode::Isometry const& iso) {
                return radius_about_origin(iso.of) + 2 * norm(iso.about);
            },
        },
        s->node);
}

ShapeExpr parse_shape(nlohmann::json const& doc, int dim)
{
    if (dim < 1 || dim > 3)
        throw ConfigError("shape: dimension must be 1, 2 or 3");
    if (!doc.is_object() || doc.size() != 1)
        throw ConfigError("shape: each node must be an object with one key");
    auto const& [key, body] = *doc.items().begin();
    if (key == "ball")
    {
        if (!body.contains("center") || !body.contains("r"))
            throw ConfigError("shape: ball needs 'center' and 'r'");
        if (!body["r"].is_number())
            throw ConfigError("shape: ball 'r' must be a number");
        return make_ball(dim,
                         read_point(body["center"], dim, "center"),
                         body["r"].get<double>());
    }
    if (key == "box")
    {
        if (!body.contains("lo") || !body.contains("hi"))
            throw ConfigError("shape: box needs 'lo' and 'hi'");
        return make_box(dim,
                        read_point(body["lo"], dim, "lo"),
                        read_point(body["hi"], dim, "hi"));
    }
    if (key == "union" || key == "intersect")
    {
        if (!body.is_array())
            throw ConfigError("shape: '" + key + "' takes an array");
        std::vector<ShapeExpr> parts;
        for (auto const& c : body)
            parts.push_back(parse_shape(c, dim));
        if (parts.empty())
            return make_empty(dim);
        return key == "union" ? make_union(std::move(parts))
                              : make_intersection(std::move(parts));
    }
    if (key == "diff")
    {
        if (!body.is_array() || body.size() != 2)
            throw ConfigError("shape: 'diff' takes [keep, remove]");
        return make_difference(parse_shape(body[0], dim),
                               parse_shape(body[1], dim));
    }
    if (key == "translate")
    {
        if (!body.contains("by") || !body.contains("of"))
            throw ConfigError("shape: translate needs 'by' and 'of'");
        return make_translate(parse_shape(body["of"], dim),
                              read_point(body["by"], dim, "by"));
    }
    if (key == "isometry")
    {
        if (!body.contains("perm") || !body.contains("signs")
            || !body.contains("of"))
        {
            throw ConfigError("shape: isometry needs 'perm', 'signs', 'of'");
        }
        IsometryElem e = IsometryElem::identity(dim);
        auto const& perm = body["perm"];
        auto const& signs = body["signs"];
        if (!perm.is_array() || !signs.is_array()
            || static_cast<int>(perm.size()) != dim
            || static_cast<int>(signs.size()) != dim)
        {
            throw ConfigError("shape: isometry perm/signs must have d entries");
        }
        std::array<bool, 3> seen{false, false, false};
        for (int a = 0; a < dim; ++a)
        {
            int const p = perm[a].get<int>();
            int const sg = signs[a].get<int>();
            if (p < 0 || p >= dim || seen[p] || (sg != 1 && sg != -1))
                throw ConfigError("shape: isometry is not a signed permutation");
            seen[p] = true;
            e.perm[a] = p;
            e.sign[a] = sg;
        }
        Point about{0, 0, 0};
        if (body.contains("about"))
            about = read_point(body["about"], dim, "about");
        return make_isometry(parse_shape(body["of"], dim), e, about);
    }
    if (key == "empty")
        return make_empty(dim);
    throw ConfigError("shape: unknown node '" + key + "'");
}

nlohmann::json shape_to_json(ShapeExpr const& s)
{
    using nlohmann::json;
    int const d = s->dim;
    return std::visit(
        Overloaded{
            [&](ShapeNode::Ball const& b) {
                return json{{"ball",
                             {{"center", write_point(b.center, d)},
                              {"r", b.radius}}}};
            },
            [&](ShapeNode::Box const& b) {
                return json{
                    {"box", {{"lo", write_point(b.lo, d)}, {"hi", write_point(b.hi, d)}}}};
            },
            [&](ShapeNode::Union const& u) {
                json arr = json::array();
                for (auto const& c : u.parts)
                    arr.push_back(shape_to_json(c));
                return json{{"union", arr}};
            },
            [&](ShapeNode::Intersection const& u) {
                json arr = json::array();
                for (auto const& c : u.parts)
                    arr.push_back(shape_to_json(c));
                return json{{"intersect", arr}};
            },
            [&](ShapeNode::Difference const& df) {
                return json{
                    {"diff", json::array({shape_to_json(df.keep), shape_to_json(df.remove)})}};
            },
            [&](ShapeNode::Translate const& t) {
                return json{
                    {"translate", {{"by", write_point(t.by, d)}, {"of", shape_to_json(t.of)}}}};
            },
            [&](ShapeNode::Isometry const& iso) {
                json perm = json::array(), signs = json::array();
                for (int a = 0; a < d; ++a)
                {
                    perm.push_back(iso.element.perm[a]);
                    signs.push_back(iso.element.sign[a]);
                }
                return json{{"isometry",
                             {{"perm", perm},
                              {"signs", signs},
                              {"about", write_point(iso.about, d)},
                              {"of", shape_to_json(iso.of)}}}};
            },
        },
        s->node);
}

//---------------------------------------------------------------------------//
// Rasterization
//---------------------------------------------------------------------------//

Mask rasterize(ShapeExpr const& shape, GridSpec const& grid)
{
    int const d = grid.dim();
    if (shape->dim != d)
        throw ConfigError("rasterize: shape and grid dimensions differ");
    Mask m(grid);
    RealBox const bb = bounding_box(shape);
    if (bb.empty)
        return m;
    Point const glo = grid.lo();
    Point const ghi = grid.hi();
    double const slack = 1e-12 * grid.h();
    for (int a = 0; a < d; ++a)
    {
        if (bb.lo[a] < glo[a] - slack || bb.hi[a] > ghi[a] + slack)
        {
            std::ostringstream os;
            os << "rasterize: shape exceeds grid box along axis " << a << " ("
               << (bb.lo[a] < glo[a] - slack ? "-" : "+") << " side)";
            throw OutOfBounds(os.str());
        }
    }
    IndexBox scan;
    for (int a = 0; a < d; ++a)
    {
        scan.lo[a] = grid.cell_containing(bb.lo).at(a) - 1;
        scan.hi[a] = grid.cell_containing(bb.hi).at(a) + 2;
    }
    scan = scan.intersect(grid.box(), d);
    Index k{0, 0, 0};
    for (k[2] = scan.lo[2]; k[2] < scan.hi[2]; ++k[2])
    {
        for (k[1] = scan.lo[1]; k[1] < scan.hi[1]; ++k[1])
        {
            for (k[0] = scan.lo[0]; k[0] < scan.hi[0]; ++k[0])
            {
                if (contains(shape, grid.center(k)))
                    m.set(grid.linear(k), true);
            }
        }
    }
    return m;
}

std::vector<double> squared_distance_to(Mask const& sites, bool outside_is_site)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    GridSpec const& g = sites.grid();
    int const d = g.dim();
    long const pad = outside_is_site ? 1 : 0;
    std::array<long, 3> n{1, 1, 1};
    for (int a = 0; a < d; ++a)
        n[a] = g.extent(a) + 2 * pad;
    std::vector<double> f(static_cast<std::size_t>(n[0] * n[1] * n[2]),
                          outside_is_site ? 0.0 : inf);
    auto padded = [&](Index const& k) {
        long i = 0, s = 1;
        for (int a = 0; a < 3; ++a)
        {
            long const off = (a < d) ? (k[a] - g.box().lo[a] + pad) : 0;
            i += off * s;
            s *= n[a];
        }
        return static_cast<std::size_t>(i);
    };
    for (std::size_t i = 0; i < sites.size(); ++i)
        f[padded(g.index(i))] = sites[i] ? 0.0 : inf;
    distance_transform(f, n, d);
    std::vector<double> out(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i)
        out[i] = f[padded(g.index(i))];
    return out;
}

Mask inflate(Mask const& m, double eps)
{
    GridSpec const& g = m.grid();
    int const d = g.dim();
    if (!(eps > 0))
        throw ConfigError("inflate: eps must be positive");
    double const reach = eps / g.h();
    // a true cell closer than eps to the outside lattice cells would spill
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        if (!m[i])
            continue;
        Index const k = g.index(i);
        for (int a = 0; a < d; ++a)
        {
            auto const below = static_cast<double>(k[a] - g.box().lo[a] + 1);
            auto const above = static_cast<double>(g.box().hi[a] - k[a]);
            if (below <= reach || above <= reach)
            {
                std::ostringstream os;
                os << "inflate: dilation by " << eps
                   << " leaves the grid along axis " << a << " ("
                   << (below <= reach ? "-" : "+") << " side); pad the grid";
                throw OutOfBounds(os.str());
            }
        }
    }
    auto const dist2 = squared_distance_to(m, false);
    double const r2 = reach * reach * (1 + 1e-12);
    Mask out(g);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.set(i, dist2[i] <= r2);
    return out;
}

Mask deflate(Mask const& m, double eps)
{
    GridSpec const& g = m.grid();
    if (!(eps > 0))
        throw ConfigError("deflate: eps must be positive");
    Mask complement(g);
    for (std::size_t i = 0; i < m.size(); ++i)
        complement.set(i, !m[i]);
    auto const dist2 = squared_distance_to(complement, true);
    double const reach = eps / g.h();
    double const r2 = reach * reach * (1 + 1e-12);
    Mask out(g);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.set(i, dist2[i] > r2);
    return out;
}

Mask apply_isometry_about(Mask const& m, IsometryElem const& u, Point const& x)
{
    GridSpec const& g = m.grid();
    if (u.dim != g.dim())
        throw ConfigError("apply_isometry_about: dimension mismatch");
    Index const kx = g.cell_at_center(x);
    Mask out(g);
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        if (!m[i])
            continue;
        Index const k = g.index(i);
        Index rel{0, 0, 0};
        for (int a = 0; a < g.dim(); ++a)
            rel[a] = k[a] - kx[a];
        Index img = u.apply(rel);
        for (int a = 0; a < g.dim(); ++a)
            img[a] += kx[a];
        if (!g.contains(img))
            throw OutOfBounds("apply_isometry_about: image escapes the grid");
        out.set(g.linear(img), true);
    }
    return out;
}

GridSpec centered_window(GridSpec const& lattice, Index const& x, double radius)
{
    int const d = lattice.dim();
    auto const half = static_cast<long>(std::ceil(radius / lattice.h()));
    IndexBox b;
    for (int a = 0; a < d; ++a)
    {
        b.lo[a] = x[a] - half;
        b.hi[a] = x[a] + half + 1;
    }
    return lattice.window(b);
}

Mask ball_mask(GridSpec const& grid, Point const& x, double radius)
{
    Mask m(grid);
    int const d = grid.dim();
    double const rr = radius / grid.h();
    double const r2 = rr * rr;
    // integer arithmetic when the center is a cell center keeps the ball
    // exactly symmetric on the lattice
    Point rel0{0, 0, 0};
    bool on_center = true;
    Index kx{0, 0, 0};
    try
    {
        kx = grid.cell_at_center(x);
    }
    catch (ConfigError const&)
    {
        on_center = false;
        for (int a = 0; a < d; ++a)
            rel0[a] = (x[a] - grid.origin()[a]) / grid.h() - 0.5;
    }
    IndexBox scan;
    for (int a = 0; a < d; ++a)
    {
        double const c = on_center ? static_cast<double>(kx[a]) : rel0[a];
        scan.lo[a] = static_cast<long>(std::floor(c - rr)) - 1;
        scan.hi[a] = static_cast<long>(std::ceil(c + rr)) + 2;
    }
    scan = scan.intersect(grid.box(), d);
    Index k{0, 0, 0};
    for (k[2] = scan.lo[2]; k[2] < scan.hi[2]; ++k[2])
    {
        for (k[1] = scan.lo[1]; k[1] < scan.hi[1]; ++k[1])
        {
            for (k[0] = scan.lo[0]; k[0] < scan.hi[0]; ++k[0])
            {
                double s = 0;
                for (int a = 0; a < d; ++a)
                {
                    double const t = on_center
                                         ? static_cast<double>(k[a] - kx[a])
                                         : static_cast<double>(k[a]) - rel0[a];
                    s += t * t;
                }
                if (s < r2)
                    m.set(grid.linear(k), true);
            }
        }
    }
    return m;
}

Mask cookie_cutter(Point const& x, double radius, Mask const& table)
{
    if (!table.at(table.grid().cell_at_center(x)))
        throw ConfigError("cookie_cutter: center is not in the table set");
    return symmetric_core(x, radius, table);
}

Mask symmetric_core(Point const& x, double radius, Mask const& table)
{
    GridSpec const& g = table.grid();
    int const d = g.dim();
    if (!(radius > 0))
        throw ConfigError("cookie_cutter: radius must be positive");
    Index const kx = g.cell_at_center(x);

    // The result lies inside the table, so the window only needs to reach
    // the farthest table cell; it stays centered on x either way.
    IndexBox const tb = table.bounds();
    if (tb.empty(d))
        return Mask(g.window(IndexBox{kx, {kx[0] + 1, kx[1] + 1, kx[2] + 1}}));
    long reach = 0;
    for (int a = 0; a < d; ++a)
        reach = std::max({reach, kx[a] - tb.lo[a], tb.hi[a] - 1 - kx[a]});
    auto const half
        = std::min(static_cast<long>(std::ceil(radius / g.h())), reach);
    IndexBox wb;
    for (int a = 0; a < d; ++a)
    {
        wb.lo[a] = kx[a] - half;
        wb.hi[a] = kx[a] + half + 1;
    }
    GridSpec const window = g.window(wb);

    auto const group = cubic_isometries(d);
    double const rr = radius / g.h();
    double const r2 = rr * rr;
    Mask out(window);
    Index k{0, 0, 0};
    for (k[2] = wb.lo[2]; k[2] < wb.hi[2]; ++k[2])
    {
        for (k[1] = wb.lo[1]; k[1] < wb.hi[1]; ++k[1])
        {
            for (k[0] = wb.lo[0]; k[0] < wb.hi[0]; ++k[0])
            {
                Index rel{0, 0, 0};
                double s = 0;
                for (int a = 0; a < d; ++a)
                {
                    rel[a] = k[a] - kx[a];
                    s += static_cast<double>(rel[a] * rel[a]);
                }
                if (!(s < r2))
                    continue;
                bool inside = true;
                for (auto const& u : group)
                {
                    Index img = u.apply(rel);
                    for (int a = 0; a < d; ++a)
                        img[a] += kx[a];
                    if (!table.at(img))
                    {
                        inside = false;
                        break;
                    }
                }
                if (inside)
                    out.set(window.linear(k), true);
            }
        }
    }
    return out;
}

double diameter_constant(int dim)
{
    return 2.0 / (std::pow(9.0 / 8.0, 1.0 / dim) - 1.0);
}

double unit_ball_volume(int dim)
{
    switch (dim)
    {
        case 1:
            return 2.0;
        case 2:
            return std::numbers::pi;
        case 3:
            return 4.0 * std::numbers::pi / 3.0;
        default:
            throw ConfigError("unit_ball_volume: dimension must be 1, 2 or 3");
    }
}

}  // namespace smashlab
