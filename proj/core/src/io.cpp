#include "phsdcs/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "phsdcs/error.hpp"

namespace phsdcs {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- PGM header tokenizer ---

class PgmHeader {
 public:
  explicit PgmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) out.push_back(char(bytes_[pos_++]));
    if (out.empty()) throw DataError("pgm: truncated header");
    return out;
  }

  std::size_t number(const char* what) {
    const std::string t = token();
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw DataError(std::string("pgm: malformed ") + what + " '" + t + "'");
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw DataError("pgm: missing whitespace before raster");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

// --- FITS ---

constexpr std::size_t kFitsBlock = 2880;
constexpr std::size_t kCardLen = 80;

struct FitsCard {
  std::string keyword;
  std::string value;  // trimmed, comment removed; quotes kept for strings
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(' ');
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(' ');
  return s.substr(b, e - b + 1);
}

FitsCard parse_card(const char* card) {
  FitsCard out;
  out.keyword = trim(std::string(card, 8));
  if (card[8] != '=' || card[9] != ' ') return out;
  std::string rest(card + 10, kCardLen - 10);
  bool in_quote = false;
  std::size_t cut = rest.size();
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (rest[i] == '\'') in_quote = !in_quote;
    if (rest[i] == '/' && !in_quote) {
      cut = i;
      break;
    }
  }
  out.value = trim(rest.substr(0, cut));
  return out;
}

long long card_int(const std::map<std::string, std::string>& cards, const std::string& key) {
  const auto it = cards.find(key);
  if (it == cards.end()) throw DataError("fits: missing " + key + " card");
  long long v = 0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("fits: malformed integer for " + key + ": '" + s + "'");
  }
  return v;
}

double card_real(const std::map<std::string, std::string>& cards, const std::string& key,
                 double fallback) {
  const auto it = cards.find(key);
  if (it == cards.end()) return fallback;
  std::string s = it->second;
  std::replace(s.begin(), s.end(), 'D', 'E');
  std::replace(s.begin(), s.end(), 'd', 'e');
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw DataError("fits: malformed real for " + key + ": '" + it->second + "'");
  }
  return v;
}

std::uint64_t read_be(const std::uint8_t* p, int nbytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < nbytes; ++i) v = (v << 8) | p[i];
  return v;
}

double decode_sample(const std::uint8_t* p, int bitpix) {
  switch (bitpix) {
    case 8:
      return static_cast<double>(p[0]);
    case 16:
      return static_cast<double>(static_cast<std::int16_t>(read_be(p, 2)));
    case 32:
      return static_cast<double>(static_cast<std::int32_t>(read_be(p, 4)));
    case -32: {
      const auto bits = static_cast<std::uint32_t>(read_be(p, 4));
      float f;
      std::memcpy(&f, &bits, sizeof f);
      return static_cast<double>(f);
    }
    case -64: {
      const auto bits = read_be(p, 8);
      double d;
      std::memcpy(&d, &bits, sizeof d);
      return d;
    }
    default:
      throw DataError("fits: unsupported BITPIX " + std::to_string(bitpix));
  }
}

std::size_t floor_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p * 2 <= n) p *= 2;
  return p;
}

// --- CSV ---

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

template <typename T>
std::string opt_field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) return format_double(*v);
  else return std::to_string(*v);
}

}  // namespace

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Image read_pgm(std::span<const std::uint8_t> bytes) {
  PgmHeader hdr(bytes);
  const std::string magic = hdr.token();
  if (magic != "P5") {
    if (magic.size() == 2 && magic[0] == 'P') throw DataError("pgm: unsupported variant " + magic);
    throw DataError("pgm: not a PGM file");
  }
  const std::size_t width = hdr.number("width");
  const std::size_t height = hdr.number("height");
  const std::size_t maxval = hdr.number("maxval");
  if (width == 0 || height == 0) throw DataError("pgm: zero dimension");
  int depth = 0;
  if (maxval == 255) depth = 8;
  else if (maxval == 65535) depth = 16;
  else throw DataError("pgm: unsupported maxval " + std::to_string(maxval));
  const std::size_t start = hdr.raster_start();
  const std::size_t sample = depth == 8 ? 1 : 2;
  const std::size_t need = width * height * sample;
  if (bytes.size() < start + need) throw DataError("pgm: truncated raster");
  if (bytes.size() > start + need) throw DataError("pgm: trailing bytes after raster");
  std::vector<double> px(width * height);
  for (std::size_t i = 0; i < px.size(); ++i) {
    const std::uint8_t* p = bytes.data() + start + i * sample;
    px[i] = static_cast<double>(sample == 1 ? p[0] : read_be(p, 2));
  }
  return Image(width, height, std::move(px), depth);
}

Bytes write_pgm(const Image& img) {
  const double maxval = img.peak();
  const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n" +
                             std::to_string(static_cast<long>(maxval)) + "\n";
  Bytes out(header.begin(), header.end());
  const bool wide = img.bit_depth() == 16;
  out.reserve(out.size() + img.size() * (wide ? 2 : 1));
  for (double v : img.pixels()) {
    const auto q = static_cast<std::uint32_t>(std::round(std::clamp(v, 0.0, maxval)));
    if (wide) out.push_back(static_cast<std::uint8_t>(q >> 8));
    out.push_back(static_cast<std::uint8_t>(q & 0xffU));
  }
  return out;
}

std::string CropInfo::to_string() const {
  if (!cropped) return {};
  return std::to_string(row0) + ":" + std::to_string(col0) + ":" + std::to_string(height) + "x" +
         std::to_string(width);
}

Image center_crop_pow2(const Image& img, std::size_t max_side, bool square, CropInfo* info) {
  std::size_t h = floor_pow2(img.height());
  std::size_t w = floor_pow2(img.width());
  if (max_side > 0) {
    h = std::min(h, floor_pow2(max_side));
    w = std::min(w, floor_pow2(max_side));
  }
  if (square) h = w = std::min(h, w);
  CropInfo c;
  c.height = h;
  c.width = w;
  c.row0 = (img.height() - h) / 2;
  c.col0 = (img.width() - w) / 2;
  c.cropped = h != img.height() || w != img.width();
  if (info) *info = c;
  if (!c.cropped) return img;
  std::vector<double> px(h * w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t col = 0; col < w; ++col) px[r * w + col] = img.at(c.row0 + r, c.col0 + col);
  }
  return Image(w, h, std::move(px), img.bit_depth());
}

FitsImage read_fits_primary(std::span<const std::uint8_t> bytes, std::size_t crop_size) {
  std::map<std::string, std::string> cards;
  std::size_t pos = 0;
  bool found_end = false;
  bool first = true;
  while (!found_end) {
    if (pos + kFitsBlock > bytes.size()) throw DataError("fits: missing END card");
    for (std::size_t c = 0; c < kFitsBlock / kCardLen && !found_end; ++c) {
      const auto* card = reinterpret_cast<const char*>(bytes.data() + pos + c * kCardLen);
      const FitsCard fc = parse_card(card);
      if (first) {
        if (fc.keyword != "SIMPLE") throw DataError("fits: first card is not SIMPLE");
        if (fc.value != "T") throw DataError("fits: SIMPLE is not T");
        first = false;
      }
      if (fc.keyword == "END") found_end = true;
      else if (!fc.keyword.empty() && !fc.value.empty()) cards.emplace(fc.keyword, fc.value);
    }
    pos += kFitsBlock;
  }

  FitsImage out;
  out.bitpix = static_cast<int>(card_int(cards, "BITPIX"));
  if (out.bitpix != 8 && out.bitpix != 16 && out.bitpix != 32 && out.bitpix != -32 &&
      out.bitpix != -64) {
    throw DataError("fits: unsupported BITPIX " + std::to_string(out.bitpix));
  }
  const long long naxis = card_int(cards, "NAXIS");
  if (naxis != 2) throw DataError("fits: unsupported NAXIS " + std::to_string(naxis));
  const long long w = card_int(cards, "NAXIS1");
  const long long h = card_int(cards, "NAXIS2");
  if (w <= 0 || h <= 0) throw DataError("fits: non-positive axis length");
  out.bscale = card_real(cards, "BSCALE", 1.0);
  out.bzero = card_real(cards, "BZERO", 0.0);

  const auto width = static_cast<std::size_t>(w);
  const auto height = static_cast<std::size_t>(h);
  const std::size_t sample = static_cast<std::size_t>(std::abs(out.bitpix)) / 8;
  const std::size_t data_bytes = width * height * sample;
  if (pos + data_bytes > bytes.size()) throw DataError("fits: truncated data unit");
  const std::size_t padded = (data_bytes + kFitsBlock - 1) / kFitsBlock * kFitsBlock;
  const std::size_t next = pos + padded;
  if (next + 8 <= bytes.size() &&
      std::string(reinterpret_cast<const char*>(bytes.data() + next), 8) == "XTENSION") {
    throw DataError("fits: extensions present; only a single primary HDU is supported");
  }

  std::vector<double> px(width * height);
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double raw = decode_sample(bytes.data() + pos + i * sample, out.bitpix);
    if (!std::isfinite(raw)) throw DataError("fits: non-finite sample (NaN blanks unsupported)");
    px[i] = out.bscale * raw + out.bzero;
    lo = std::min(lo, px[i]);
    hi = std::max(hi, px[i]);
  }
  const int depth = out.bitpix == 8 ? 8 : 16;
  const double peak = std::ldexp(1.0, depth) - 1.0;
  if (lo < 0.0 || hi > peak) {
    out.rescaled = true;
    const double span = hi - lo;
    for (auto& v : px) v = span > 0.0 ? (v - lo) / span * peak : 0.0;
  }
  Image img(width, height, std::move(px), depth);
  out.image = crop_size > 0 ? center_crop_pow2(img, crop_size, false, &out.crop) : std::move(img);
  return out;
}

Image read_image(std::span<const std::uint8_t> bytes, std::size_t crop_size, CropInfo* crop) {
  if (bytes.size() >= 6 && std::memcmp(bytes.data(), "SIMPLE", 6) == 0) {
    auto fits = read_fits_primary(bytes, crop_size);
    if (crop) *crop = fits.crop;
    return std::move(fits.image);
  }
  Image img = read_pgm(bytes);
  if (crop_size > 0) return center_crop_pow2(img, crop_size, false, crop);
  if (crop) *crop = {};
  return img;
}

std::string write_mask(const SamplingMask& mask) {
  std::string out = "mask " + std::to_string(mask.n_t()) + " " + std::to_string(mask.n_y()) + " " +
                    to_string(mask.domain()) + " " + std::to_string(mask.size()) + "\n";
  for (const auto& idx : mask.indices()) {
    out += std::to_string(idx.u);
    out += ' ';
    out += std::to_string(idx.v);
    out += '\n';
  }
  return out;
}

SamplingMask read_mask(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("mask file is empty");
  std::istringstream hdr(line);
  std::string tag, domain, extra;
  long long n_t = 0, n_y = 0, m = 0;
  if (!(hdr >> tag >> n_t >> n_y >> domain >> m) || tag != "mask" || (hdr >> extra)) {
    throw DataError("mask file: malformed header '" + line + "'");
  }
  if (n_t <= 0 || n_y <= 0 || m < 0) throw DataError("mask file: invalid header values");
  const MaskDomain dom = parse_mask_domain(domain);
  std::vector<GridIndex> indices;
  indices.reserve(static_cast<std::size_t>(m));
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream row(line);
    long long u = -1, v = -1;
    if (!(row >> u >> v) || (row >> extra) || u < 0 || v < 0) {
      throw DataError("mask file: malformed row " + std::to_string(lineno) + ": '" + line + "'");
    }
    indices.push_back({static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
  }
  if (indices.size() != static_cast<std::size_t>(m)) {
    throw DataError("mask file: header declares " + std::to_string(m) + " indices, found " +
                    std::to_string(indices.size()));
  }
  SamplingMask probe(static_cast<std::size_t>(n_t), static_cast<std::size_t>(n_y), dom, indices);
  const bool herm = dom == MaskDomain::fourier && probe.closed_under_negation();
  return SamplingMask(static_cast<std::size_t>(n_t), static_cast<std::size_t>(n_y), dom,
                      std::move(indices), herm);
}

std::string write_measurements(const MeasurementVector& meas) {
  std::string out = "measurements " + std::to_string(meas.values.size()) + " " +
                    (meas.mask_id.empty() ? "-" : meas.mask_id) + "\n";
  for (const auto& v : meas.values) {
    out += format_double(v.real());
    out += ' ';
    out += format_double(v.imag());
    out += '\n';
  }
  return out;
}

MeasurementVector read_measurements(const std::string& text) {
  std::istringstream in(text);
  std::string line, tag;
  if (!std::getline(in, line)) throw DataError("measurement file is empty");
  std::istringstream hdr(line);
  long long m = -1;
  MeasurementVector out;
  if (!(hdr >> tag >> m >> out.mask_id) || tag != "measurements" || m < 0) {
    throw DataError("measurement file: malformed header '" + line + "'");
  }
  if (out.mask_id == "-") out.mask_id.clear();
  while (std::getline(in, line)) {
    std::istringstream row(line);
    double re = 0.0, im = 0.0;
    if (!(row >> re >> im)) throw DataError("measurement file: malformed row '" + line + "'");
    out.values.emplace_back(re, im);
  }
  if (out.values.size() != static_cast<std::size_t>(m)) {
    throw DataError("measurement file: value count does not match header");
  }
  return out;
}

std::vector<std::string> report_columns(bool with_delta) {
  std::vector<std::string> cols = {
      "image_id",      "mask_id",        "basis_tag",    "solver",        "lines",
      "points_per_line", "hermitian",    "m",            "n",             "iterations",
      "mu",            "gamma",          "operator_norm", "psnr_db",      "final_residual",
      "kkt_residual",  "k_significant",  "clamped_filters", "crop",       "status",
      "wall_time_seconds"};
  if (with_delta) cols.emplace_back("psnr_delta_phsd_minus_daub2d");
  return cols;
}

std::string write_report_csv(std::span<const ExperimentReport> reports, bool with_delta) {
  std::string out;
  const auto cols = report_columns(with_delta);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  out += "\r\n";
  for (const auto& r : reports) {
    std::vector<std::string> f = {
        r.image_id,
        r.mask_id,
        r.basis_tag,
        r.solver,
        opt_field(r.lines),
        opt_field(r.points_per_line),
        r.hermitian ? "true" : "false",
        std::to_string(r.m),
        std::to_string(r.n),
        std::to_string(r.iterations),
        format_double(r.mu),
        format_double(r.gamma),
        opt_field(r.operator_norm),
        r.psnr_db ? r.psnr_db->to_string() : std::string(),
        opt_field(r.final_residual),
        opt_field(r.kkt_residual),
        opt_field(r.k_significant),
        std::to_string(r.clamped_filters),
        r.crop,
        r.status,
        opt_field(r.wall_time_seconds)};
    if (with_delta) f.push_back(opt_field(r.psnr_delta_db));
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i) out += ',';
      out += csv_field(f[i]);
    }
    out += "\r\n";
  }
  return out;
}

std::string write_trace_csv(const SolveResult& result) {
  std::string out = "iteration,objective,residual\n";
  for (std::size_t k = 0; k < result.objective_trace.size(); ++k) {
    out += std::to_string(k + 1) + "," + format_double(result.objective_trace[k]) + "," +
           format_double(result.residual_trace[k]) + "\n";
  }
  return out;
}

}  // namespace phsdcs
