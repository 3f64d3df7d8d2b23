// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "pds/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "pds/error.hpp"

namespace pds {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

std::uint32_t load_u32_le(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

void store_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::vector<std::string> default_ids(std::size_t rows) {
  std::vector<std::string> ids;
  ids.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) ids.push_back(std::to_string(r));
  return ids;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return out;
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<std::string> ids)
    : EmbeddingMatrix(rows, dims, std::vector<float>(rows * dims, 0.0f),
                      ids.empty() ? default_ids(rows) : std::move(ids)) {}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> data,
                                 std::vector<std::string> ids)
    : rows_(rows), dims_(dims), data_(std::move(data)), ids_(std::move(ids)) {
  if (dims_ == 0) throw Error(Errc::shape_mismatch, "embedding dims must be >= 1");
  if (data_.size() != rows_ * dims_)
    throw Error(Errc::shape_mismatch, "data length " + std::to_string(data_.size()) +
                                          " != rows*dims " + std::to_string(rows_ * dims_));
  if (ids_.empty() && rows_ > 0) ids_ = default_ids(rows_);
  if (ids_.size() != rows_)
    throw Error(Errc::shape_mismatch, "id count " + std::to_string(ids_.size()) +
                                          " != rows " + std::to_string(rows_));
  index_ids();
}

void EmbeddingMatrix::index_ids() {
  id_index_.clear();
  id_index_.reserve(ids_.size());
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (!id_index_.emplace(ids_[r], r).second)
      throw Error(Errc::duplicate_id, "duplicate embedding id '" + ids_[r] + "'");
  }
}

std::optional<std::size_t> EmbeddingMatrix::find(const std::string& id) const {
  auto it = id_index_.find(id);
  if (it == id_index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingMatrix EmbeddingMatrix::gather(std::span<const std::size_t> rows) const {
  std::vector<float> data;
  data.reserve(rows.size() * dims_);
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  std::unordered_map<std::size_t, std::size_t> seen;
  for (std::size_t r : rows) {
    if (r >= rows_) throw Error(Errc::invalid_argument, "gather row out of range");
    auto src = row(r);
    data.insert(data.end(), src.begin(), src.end());
    std::size_t& n = seen[r];
    ids.push_back(n == 0 ? ids_[r] : ids_[r] + "#" + std::to_string(n));
    ++n;
  }
  return EmbeddingMatrix(rows.size(), dims_, std::move(data), std::move(ids));
}

void EmbeddingMatrix::validate() const {
  if (data_.size() != rows_ * dims_) throw Error(Errc::shape_mismatch, "data length mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i]))
      throw Error(Errc::non_finite, "non-finite value at row " + std::to_string(i / dims_) +
                                        " col " + std::to_string(i % dims_));
  }
}

std::string encode_embeddings(const EmbeddingMatrix& matrix) {
  nlohmann::ordered_json header;
  header["dtype"] = "f32";
  header["shape"] = {matrix.rows(), matrix.dims()};
  header["order"] = "row-major";
  header["ids"] = matrix.ids();
  std::string header_text = header.dump();

  std::string out;
  out.reserve(8 + header_text.size() + matrix.data().size() * 4);
  out.append(kMagic, 4);
  store_u32_le(out, static_cast<std::uint32_t>(header_text.size()));
  out += header_text;
  for (float f : matrix.data()) store_u32_le(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

EmbeddingMatrix decode_embeddings(std::span<const char> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(Errc::bad_magic, "missing EMB1 magic");
  if (bytes.size() < 8) throw Error(Errc::bad_header, "missing header length");
  std::uint32_t header_len = load_u32_le(bytes.data() + 4);
  if (bytes.size() - 8 < header_len)
    throw Error(Errc::bad_header, "header length " + std::to_string(header_len) + " exceeds file");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.data() + 8, bytes.data() + 8 + header_len);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_header, std::string("header is not valid JSON: ") + e.what());
  }
  std::size_t rows = 0, dims = 0;
  std::vector<std::string> ids;
  try {
    if (header.at("dtype").get<std::string>() != "f32")
      throw Error(Errc::bad_header, "dtype must be f32");
    if (header.contains("order") && header.at("order").get<std::string>() != "row-major")
      throw Error(Errc::bad_header, "order must be row-major");
    const auto& shape = header.at("shape");
    if (!shape.is_array() || shape.size() != 2) throw Error(Errc::bad_header, "shape must be [N,D]");
    rows = shape[0].get<std::size_t>();
    dims = shape[1].get<std::size_t>();
    ids = header.at("ids").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_header, std::string("malformed header: ") + e.what());
  }
  if (dims == 0) throw Error(Errc::shape_mismatch, "dims must be >= 1");
  if (ids.size() != rows)
    throw Error(Errc::shape_mismatch, "shape declares " + std::to_string(rows) + " rows but " +
                                          std::to_string(ids.size()) + " ids");

  std::size_t payload = bytes.size() - 8 - header_len;
  std::size_t expected = rows * dims * 4;
  if (payload < expected)
    throw Error(Errc::truncated_payload, "payload has " + std::to_string(payload) +
                                             " bytes, expected " + std::to_string(expected));
  if (payload > expected)
    throw Error(Errc::shape_mismatch, "payload has " + std::to_string(payload - expected) +
                                          " trailing bytes");

  std::vector<float> data(rows * dims);
  const char* p = bytes.data() + 8 + header_len;
  for (std::size_t i = 0; i < data.size(); ++i, p += 4)
    data[i] = std::bit_cast<float>(load_u32_le(p));

  EmbeddingMatrix m(rows, dims, std::move(data), std::move(ids));
  m.validate();
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::io_failure, "read failed for '" + path.string() + "'");
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_failure, "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(Errc::io_failure, "write failed for '" + path.string() + "'");
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  std::string bytes = read_file(path);
  return decode_embeddings(bytes);
}

void write_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path) {
  write_file(path, encode_embeddings(matrix));
}

bool PairTable::has_lang_prob() const {
  for (const auto& p : pairs)
    if (!p.lang_prob) return false;
  return true;
}

std::optional<std::string> PairTable::caption_text(const std::string& caption_id) const {
  for (const auto& p : pairs)
    if (p.caption_id == caption_id && p.caption_text) return p.caption_text;
  return std::nullopt;
}

PairTable parse_pairs(const std::string& tsv) {
  std::istringstream in(tsv);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::missing_column, "empty pair manifest");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto header = split_tabs(line);
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };
  auto pair_col = column("pair_id");
  auto image_col = column("image_id");
  auto caption_col = column("caption_id");
  if (!pair_col || !image_col || !caption_col)
    throw Error(Errc::missing_column, "pair manifest needs pair_id, image_id and caption_id columns");
  auto text_col = column("caption_text");
  auto lang_col = column("lang_prob");

  PairTable table;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    auto field = [&](std::optional<std::size_t> col) -> std::string {
      return col && *col < fields.size() ? fields[*col] : std::string();
    };
    PairRecord rec;
    rec.pair_id = field(pair_col);
    rec.image_id = field(image_col);
    rec.caption_id = field(caption_col);
    if (rec.pair_id.empty() || rec.image_id.empty() || rec.caption_id.empty())
      throw Error(Errc::malformed_field, "line " + std::to_string(line_no) + ": empty id field");
    if (std::string text = field(text_col); !text.empty()) rec.caption_text = std::move(text);
    if (std::string lp = field(lang_col); !lp.empty()) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(lp, &used);
      } catch (...) {
        used = 0;
      }
      if (used != lp.size() || !(v >= 0.0 && v <= 1.0))
        throw Error(Errc::malformed_field,
                    "line " + std::to_string(line_no) + ": lang_prob '" + lp + "' not in [0,1]");
      rec.lang_prob = v;
    }
    if (!seen.insert(rec.pair_id).second)
      throw Error(Errc::duplicate_pair, "duplicate pair_id '" + rec.pair_id + "'");
    table.pairs.push_back(std::move(rec));
  }
  return table;
}

PairTable read_pairs(const std::filesystem::path& path) { return parse_pairs(read_file(path)); }

void write_pairs(const PairTable& table, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "pair_id\timage_id\tcaption_id\tcaption_text\tlang_prob\n";
  for (const auto& p : table.pairs) {
    out << p.pair_id << '\t' << p.image_id << '\t' << p.caption_id << '\t'
        << p.caption_text.value_or("") << '\t';
    if (p.lang_prob) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", *p.lang_prob);
      out << buf;
    }
    out << '\n';
  }
  write_file(path, out.str());
}

std::vector<PairRows> resolve_pairs(const PairTable& pairs, const EmbeddingMatrix& img,
                                    const EmbeddingMatrix& txt) {
  std::vector<PairRows> rows;
  rows.reserve(pairs.size());
  for (const auto& p : pairs.pairs) {
    auto i = img.find(p.image_id);
    if (!i) throw Error(Errc::dangling_id, "pair '" + p.pair_id + "' image '" + p.image_id + "' not found");
    auto c = txt.find(p.caption_id);
    if (!c)
      throw Error(Errc::dangling_id,
                  "pair '" + p.pair_id + "' caption '" + p.caption_id + "' not found");
    rows.push_back({*i, *c});
  }
  return rows;
}

}  // namespace pds
