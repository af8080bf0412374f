// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0
//
// PGM rasters, CSV tables and JSON manifests.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "smashlab/grid.hpp"

namespace smashlab {

namespace fs = std::filesystem;

/*!
 * 8-bit binary PGM: 0 = false, 255 = true. The first axis runs left to
 * right and the second bottom to top; d=1 is a 1 x N image. In d=3 each
 * slice k goes to "<stem>.z<k>.pgm" and path lists the slice files.
 */
void write_pgm(Mask const& m, fs::path const& path);

//! 16-bit binary PGM of round(value * scale), clipped to 65535.
void write_pgm16(DensityField const& f, fs::path const& path, double scale);

struct PgmImage
{
    long width = 0;
    long height = 0;
    int maxval = 0;
    std::vector<int> pixels;  //!< row-major, top row first
};

//! Read a binary (P5) PGM.
PgmImage read_pgm(fs::path const& path);

//! Rows "i[,j[,k]],value" for the nonzero cells, in linear order.
void write_density_csv(DensityField const& f, fs::path const& path);

//! Shortest text that reads back to the same double.
std::string format_number(double v);

class CsvWriter
{
  public:
    CsvWriter(fs::path const& path, std::vector<std::string> const& header);
    void row(std::vector<std::string> const& cells);

  private:
    std::ofstream out_;
};

void write_json(nlohmann::json const& doc, fs::path const& path);

}  // namespace smashlab
