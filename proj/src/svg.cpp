// Copyright 2026 The pushrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pushrec/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "pushrec/keyvalue.hpp"

namespace pushrec {

namespace {

std::string rate_color(double rate) {
  // white (0) to steel blue (1)
  const int r = static_cast<int>(255 - rate * (255 - 70));
  const int g = static_cast<int>(255 - rate * (255 - 130));
  const int b = static_cast<int>(255 - rate * (255 - 180));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {  // column names
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

std::string csv_protocol(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# protocol ", 0) == 0) return line.substr(11);
    if (!line.empty() && line[0] != '#') break;
  }
  return "";
}

SweepResult parse_sweep_csv(const std::string& text) {
  SweepResult result;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# friction ", 0) == 0) {
      result.friction = std::stod(line.substr(11));
    }
  }
  for (const auto& fields : csv_rows(text)) {
    if (fields.size() < 4) continue;
    SweepCell cell;
    cell.direction = std::stod(fields[0]);
    cell.magnitude = std::stod(fields[1]);
    cell.successes = std::stoi(fields[2]);
    cell.repetitions = std::stoi(fields[3]);
    result.cells.push_back(cell);
  }
  return result;
}

EnduranceResult parse_endurance_csv(const std::string& text) {
  EnduranceResult result;
  std::map<std::string, std::size_t> index;
  for (const auto& fields : csv_rows(text)) {
    if (fields.size() < 5) continue;
    if (fields[3] == "mean" || fields[3] == "median" || fields[3] == "max") {
      continue;  // summaries are recomputed
    }
    const std::string key = fields[0] + "|" + fields[1] + "|" + fields[2];
    if (!index.count(key)) {
      index[key] = result.cells.size();
      EnduranceCell cell;
      cell.link = fields[0];
      cell.magnitude = std::stod(fields[1]);
      cell.duration = std::stod(fields[2]);
      result.cells.push_back(cell);
    }
    EpisodeResult ep;
    ep.forces_endured = std::stoi(fields[4]);
    ep.survived = fields.size() > 5 && fields[5] == "1";
    if (fields.size() > 6 && !fields[6].empty()) {
      ep.survival_time = std::stod(fields[6]);
    }
    result.cells[index[key]].episodes.push_back(ep);
  }
  return result;
}

std::string sweep_svg(const SweepResult& result) {
  // polar success map: one wedge ring segment per (direction, magnitude)
  std::set<double> dir_set, mag_set;
  for (const auto& c : result.cells) {
    dir_set.insert(c.direction);
    mag_set.insert(c.magnitude);
  }
  const std::vector<double> dirs(dir_set.begin(), dir_set.end());
  const std::vector<double> mags(mag_set.begin(), mag_set.end());
  const double max_mag = mags.empty() ? 1.0 : mags.back();

  const double size = 520.0, cx = 250.0, cy = 260.0, radius = 200.0;
  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << size + 140
      << "' height='" << size << "'>\n";
  out << "<text x='" << cx << "' y='24' text-anchor='middle' "
         "font-family='sans-serif' font-size='15'>push-recovery success "
         "rate (friction "
      << format_double(result.friction) << ")</text>\n";

  const double wedge = dirs.size() > 1 ? 2.0 * M_PI / dirs.size() : M_PI;
  for (const auto& cell : result.cells) {
    const double rate =
        cell.repetitions > 0
            ? static_cast<double>(cell.successes) / cell.repetitions
            : 0.0;
    const auto mag_it = std::find(mags.begin(), mags.end(), cell.magnitude);
    const std::size_t mi = mag_it - mags.begin();
    const double r0 = radius * (mi == 0 ? 0.05 : mags[mi - 1] / max_mag);
    const double r1 = radius * (cell.magnitude / max_mag);
    const double a0 = cell.direction - wedge / 2.0;
    const double a1 = cell.direction + wedge / 2.0;
    // y grows downward in SVG; flip the angle
    auto px = [&](double r, double a) { return cx + r * std::cos(a); };
    auto py = [&](double r, double a) { return cy - r * std::sin(a); };
    out << "<path d='M " << px(r0, a0) << ' ' << py(r0, a0) << " L "
        << px(r1, a0) << ' ' << py(r1, a0) << " A " << r1 << ' ' << r1
        << " 0 0 0 " << px(r1, a1) << ' ' << py(r1, a1) << " L " << px(r0, a1)
        << ' ' << py(r0, a1) << " A " << r0 << ' ' << r0 << " 0 0 1 "
        << px(r0, a0) << ' ' << py(r0, a0) << " Z' fill='" << rate_color(rate)
        << "' stroke='#777' stroke-width='0.4'/>\n";
  }
  // legend
  for (int i = 0; i <= 10; ++i) {
    out << "<rect x='" << size + 20 << "' y='" << 60 + (10 - i) * 18
        << "' width='24' height='18' fill='" << rate_color(i / 10.0)
        << "'/>\n";
    out << "<text x='" << size + 50 << "' y='" << 74 + (10 - i) * 18
        << "' font-family='sans-serif' font-size='11'>" << i * 10
        << "%</text>\n";
  }
  out << "<text x='" << cx << "' y='" << size - 8
      << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
         "radius: magnitude up to "
      << format_double(max_mag) << " N</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string endurance_svg(const EnduranceResult& result) {
  // heatmap: magnitude rows x duration columns, mean endured per cell
  std::set<double> mag_set, dur_set;
  double max_mean = 1.0;
  for (const auto& c : result.cells) {
    mag_set.insert(c.magnitude);
    dur_set.insert(c.duration);
    max_mean = std::max(max_mean, c.mean_endured());
  }
  const std::vector<double> mags(mag_set.begin(), mag_set.end());
  const std::vector<double> durs(dur_set.begin(), dur_set.end());

  const double cell_w = 110.0, cell_h = 64.0, x0 = 110.0, y0 = 60.0;
  const double width = x0 + cell_w * durs.size() + 30;
  const double height = y0 + cell_h * mags.size() + 50;
  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n";
  const std::string link = result.cells.empty() ? "" : result.cells[0].link;
  out << "<text x='" << width / 2
      << "' y='26' text-anchor='middle' font-family='sans-serif' "
         "font-size='15'>mean consecutive forces endured ("
      << link << " link)</text>\n";

  for (const auto& cell : result.cells) {
    const std::size_t mi =
        std::find(mags.begin(), mags.end(), cell.magnitude) - mags.begin();
    const std::size_t di =
        std::find(durs.begin(), durs.end(), cell.duration) - durs.begin();
    const double x = x0 + di * cell_w, y = y0 + mi * cell_h;
    out << "<rect x='" << x << "' y='" << y << "' width='" << cell_w
        << "' height='" << cell_h << "' fill='"
        << rate_color(cell.mean_endured() / max_mean)
        << "' stroke='#777' stroke-width='0.5'/>\n";
    char label[32];
    std::snprintf(label, sizeof(label), "%.1f", cell.mean_endured());
    out << "<text x='" << x + cell_w / 2 << "' y='" << y + cell_h / 2 + 5
        << "' text-anchor='middle' font-family='sans-serif' "
           "font-size='15'>"
        << label << "</text>\n";
  }
  for (std::size_t di = 0; di < durs.size(); ++di) {
    out << "<text x='" << x0 + di * cell_w + cell_w / 2 << "' y='"
        << y0 + cell_h * mags.size() + 24
        << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
        << format_double(durs[di]) << " s</text>\n";
  }
  for (std::size_t mi = 0; mi < mags.size(); ++mi) {
    out << "<text x='" << x0 - 12 << "' y='" << y0 + mi * cell_h + cell_h / 2
        << "' text-anchor='end' font-family='sans-serif' font-size='12'>"
        << format_double(mags[mi]) << " N</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace pushrec
