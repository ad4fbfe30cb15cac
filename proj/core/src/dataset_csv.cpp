#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "uwbrss/dataset.hpp"
#include "uwbrss/errors.hpp"

namespace uwbrss {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

std::vector<std::string> canonical_columns() {
  std::vector<std::string> cols = {
      "env_id",     "rx_id",      "true_distance_m", "tx_gain_db",
      "agc_on",     "delivered",  "fppl_db",         "rssi_db",
      "fp_idx",     "lde_ppampl", "lde_ppindx",      "fp_ampl1",
      "fp_ampl2",   "fp_ampl3"};
  for (int k = 0; k < kCirLength; ++k) cols.push_back("cir_re_" + std::to_string(k));
  for (int k = 0; k < kCirLength; ++k) cols.push_back("cir_im_" + std::to_string(k));
  return cols;
}

double parse_double(const std::string& text, std::size_t row,
                    const std::string& column) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw MalformedNumber(row, column, text);
  return v;
}

bool parse_bool(const std::string& text, std::size_t row,
                const std::string& column, bool liberal) {
  if (text == "0") return false;
  if (text == "1") return true;
  if (liberal) {
    if (text == "true" || text == "True" || text == "TRUE") return true;
    if (text == "false" || text == "False" || text == "FALSE") return false;
  }
  throw MalformedNumber(row, column, text);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

Dataset load_csv_impl(const std::string& path,
                      const std::map<std::string, std::string>* mapping) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw IoFailure("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header = split_line(line);
  if (mapping) {
    for (auto& name : header) {
      auto it = mapping->find(name);
      if (it != mapping->end()) name = it->second;
    }
  }

  const std::vector<std::string> canon = canonical_columns();
  // index of each canonical column in the file
  std::vector<std::size_t> pos(canon.size());
  if (mapping) {
    for (std::size_t c = 0; c < canon.size(); ++c) {
      auto it = std::find(header.begin(), header.end(), canon[c]);
      if (it == header.end()) throw MissingColumn(canon[c]);
      pos[c] = static_cast<std::size_t>(it - header.begin());
    }
  } else {
    if (header.size() != canon.size()) {
      for (std::size_t c = 0; c < canon.size(); ++c)
        if (c >= header.size() || header[c] != canon[c])
          throw MissingColumn(canon[c]);
    }
    for (std::size_t c = 0; c < canon.size(); ++c) {
      if (header[c] != canon[c]) throw MissingColumn(canon[c]);
      pos[c] = c;
    }
  }

  std::vector<CirRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw InvariantViolation(row, "expected " + std::to_string(header.size()) +
                                        " fields, got " +
                                        std::to_string(cells.size()));
    auto cell = [&](std::size_t c) -> const std::string& { return cells[pos[c]]; };

    CirRecord rec;
    rec.env_id = cell(0);
    rec.rx_id = static_cast<int>(parse_double(cell(1), row, canon[1]));
    rec.true_distance_m = parse_double(cell(2), row, canon[2]);
    rec.tx_gain_db = parse_double(cell(3), row, canon[3]);
    rec.agc_on = parse_bool(cell(4), row, canon[4], mapping != nullptr);
    rec.delivered = parse_bool(cell(5), row, canon[5], mapping != nullptr);
    if (rec.delivered) {
      rec.fppl_db = parse_double(cell(6), row, canon[6]);
      rec.rssi_db = parse_double(cell(7), row, canon[7]);
      rec.fp_idx = parse_double(cell(8), row, canon[8]);
      rec.lde_ppampl = parse_double(cell(9), row, canon[9]);
      rec.lde_ppindx = parse_double(cell(10), row, canon[10]);
      rec.fp_ampl1 = parse_double(cell(11), row, canon[11]);
      rec.fp_ampl2 = parse_double(cell(12), row, canon[12]);
      rec.fp_ampl3 = parse_double(cell(13), row, canon[13]);
      for (int k = 0; k < kCirLength; ++k) {
        double re = parse_double(cell(14 + k), row, canon[14 + k]);
        double im = parse_double(cell(14 + kCirLength + k), row,
                                 canon[14 + kCirLength + k]);
        rec.cir[k] = {re, im};
      }
    } else {
      clear_features(rec);
    }
    records.push_back(std::move(rec));
  }

  std::map<std::string, std::string> metadata;
  metadata["source"] = path;
  return Dataset::validated(std::move(records), std::move(metadata));
}

}  // namespace

Dataset load_csv(const std::string& path) { return load_csv_impl(path, nullptr); }

Dataset load_csv(const std::string& path,
                 const std::map<std::string, std::string>& column_mapping) {
  return load_csv_impl(path, &column_mapping);
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write " + path);

  const std::vector<std::string> canon = canonical_columns();
  std::string line;
  for (std::size_t c = 0; c < canon.size(); ++c) {
    if (c) line += ',';
    line += canon[c];
  }
  out << line << '\n';

  for (const auto& rec : ds.records()) {
    if (rec.env_id.find_first_of(",\"\n") != std::string::npos)
      throw InvariantViolation("env_id contains CSV delimiter characters");
    line.clear();
    line += rec.env_id;
    line += ',';
    line += std::to_string(rec.rx_id);
    line += ',';
    line += format_double(rec.true_distance_m);
    line += ',';
    line += format_double(rec.tx_gain_db);
    line += ',';
    line += rec.agc_on ? '1' : '0';
    line += ',';
    line += rec.delivered ? '1' : '0';
    if (rec.delivered) {
      for (double v : {rec.fppl_db, rec.rssi_db, rec.fp_idx, rec.lde_ppampl,
                       rec.lde_ppindx, rec.fp_ampl1, rec.fp_ampl2, rec.fp_ampl3}) {
        line += ',';
        line += format_double(v);
      }
      for (int k = 0; k < kCirLength; ++k) {
        line += ',';
        line += format_double(rec.cir[k].real());
      }
      for (int k = 0; k < kCirLength; ++k) {
        line += ',';
        line += format_double(rec.cir[k].imag());
      }
    } else {
      line.append(8 + 2 * kCirLength, ',');
    }
    out << line << '\n';
  }
  if (!out) throw IoFailure("write failed: " + path);
}

}  // namespace uwbrss
