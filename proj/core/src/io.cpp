// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smashlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "smashlab/errors.hpp"

namespace smashlab {

namespace {

std::ofstream open_out(fs::path const& path)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    return out;
}

//! Calls put(linear index) for each pixel of slice z, top row first.
template<class F>
void for_pixels(GridSpec const& g, long z, F&& put)
{
    long const w = g.extent(0);
    long const hgt = g.dim() > 1 ? g.extent(1) : 1;
    IndexBox const& b = g.box();
    for (long row = hgt - 1; row >= 0; --row)
    {
        for (long col = 0; col < w; ++col)
        {
            Index k{b.lo[0] + col, b.lo[1] + (g.dim() > 1 ? row : 0), b.lo[2] + z};
            put(g.linear(k));
        }
    }
}

template<class F>
void write_slices(GridSpec const& g, fs::path const& path, int bytes, F&& value)
{
    auto write_one = [&](fs::path const& p, long z) {
        auto out = open_out(p);
        out << "P5\n" << g.extent(0) << " " << (g.dim() > 1 ? g.extent(1) : 1) << "\n"
            << (bytes == 1 ? 255 : 65535) << "\n";
        for_pixels(g, z, [&](std::size_t i) {
            unsigned const v = value(i);
            if (bytes == 2)
                out.put(static_cast<char>((v >> 8) & 0xff));
            out.put(static_cast<char>(v & 0xff));
        });
    };
    if (g.dim() < 3)
    {
        write_one(path, 0);
        return;
    }
    auto index = open_out(path);
    for (long z = 0; z < g.extent(2); ++z)
    {
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, ".z%03ld.pgm", z);
        fs::path const slice = path.parent_path() / (path.stem().string() + suffix);
        write_one(slice, z);
        index << slice.filename().string() << "\n";
    }
}

}  // namespace

void write_pgm(Mask const& m, fs::path const& path)
{
    write_slices(m.grid(), path, 1, [&](std::size_t i) { return m[i] ? 255u : 0u; });
}

void write_pgm16(DensityField const& f, fs::path const& path, double scale)
{
    write_slices(f.grid(), path, 2, [&](std::size_t i) {
        double const v = std::round(f[i] * scale);
        return static_cast<unsigned>(std::clamp(v, 0.0, 65535.0));
    });
}

PgmImage read_pgm(fs::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read " + path.string());
    std::string magic;
    PgmImage img;
    in >> magic >> img.width >> img.height >> img.maxval;
    if (magic != "P5" || !in || img.width <= 0 || img.height <= 0 || img.maxval <= 0
        || img.maxval > 65535)
    {
        throw ConfigError("not a binary PGM: " + path.string());
    }
    in.get();
    int const bytes = img.maxval > 255 ? 2 : 1;
    img.pixels.resize(static_cast<std::size_t>(img.width * img.height));
    for (auto& p : img.pixels)
    {
        int v = in.get();
        if (bytes == 2)
            v = (v << 8) | in.get();
        p = v;
    }
    if (!in)
        throw ConfigError("truncated PGM: " + path.string());
    return img;
}

std::string format_number(double v)
{
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_density_csv(DensityField const& f, fs::path const& path)
{
    GridSpec const& g = f.grid();
    std::vector<std::string> header{"i"};
    if (g.dim() > 1)
        header.push_back("j");
    if (g.dim() > 2)
        header.push_back("k");
    header.push_back("value");
    CsvWriter csv(path, header);
    for (std::size_t i = 0; i < f.size(); ++i)
    {
        if (f[i] == 0)
            continue;
        Index const k = g.index(i);
        std::vector<std::string> row;
        for (int a = 0; a < g.dim(); ++a)
            row.push_back(std::to_string(k[a]));
        row.push_back(format_number(f[i]));
        csv.row(row);
    }
}

CsvWriter::CsvWriter(fs::path const& path, std::vector<std::string> const& header)
    : out_(open_out(path))
{
    row(header);
}

void CsvWriter::row(std::vector<std::string> const& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        if (i)
            out_ << ',';
        bool const quote = cells[i].find_first_of(",\"\n") != std::string::npos;
        if (!quote)
        {
            out_ << cells[i];
            continue;
        }
        out_ << '"';
        for (char ch : cells[i])
        {
            if (ch == '"')
                out_ << '"';
            out_ << ch;
        }
        out_ << '"';
    }
    out_ << '\n';
}

void write_json(nlohmann::json const& doc, fs::path const& path)
{
    auto out = open_out(path);
    out << doc.dump(2) << "\n";
}

}  // namespace smashlab
