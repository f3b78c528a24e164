#include "nncv/dataio.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "nncv/errors.hpp"

namespace nncv {

namespace fs = std::filesystem;

bool inside_circle(const CircleSpec& c, Vec2 x) {
  const double dx = x.x - c.center.x;
  const double dy = x.y - c.center.y;
  return dx * dx + dy * dy <= c.radius * c.radius;
}

std::vector<GeneratedImage> generate_dataset(const DatasetSpec& spec) {
  if (spec.count < 1) throw ConfigInvalid("dataset count must be >= 1");
  if (spec.width < 1 || spec.height < 1) throw InvalidDims("dataset image dimensions must be positive");
  if (spec.min_circles < 0 || spec.max_circles < spec.min_circles) {
    throw ConfigInvalid("invalid circles-per-image range");
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto range = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<GeneratedImage> out;
  out.reserve(spec.count);
  for (int n = 0; n < spec.count; ++n) {
    GeneratedImage g;
    g.bg = range(spec.bg_lo, spec.bg_hi);
    const int span = spec.max_circles - spec.min_circles + 1;
    const int circles = spec.min_circles + std::min(span - 1, static_cast<int>(unit(rng) * span));
    for (int c = 0; c < circles; ++c) {
      CircleSpec cs;
      cs.center = {range(0.15, 0.85), range(0.15, 0.85)};
      cs.radius = range(spec.min_radius, spec.max_radius);
      cs.fg = range(spec.fg_lo, spec.fg_hi);
      // contrast floor: keep objects at least 0.2 away from the background
      if (std::abs(cs.fg - g.bg) < 0.2) {
        cs.fg = g.bg < 0.5 ? g.bg + 0.2 : g.bg - 0.2;
      }
      g.circles.push_back(cs);
    }

    g.image = GrayImage(spec.width, spec.height, g.bg);
    g.truth = LabelMask(spec.width, spec.height, 0);
    for (int j = 0; j < spec.height; ++j) {
      for (int i = 0; i < spec.width; ++i) {
        const Vec2 x = g.image.center(i, j);
        for (std::size_t c = 0; c < g.circles.size(); ++c) {
          if (inside_circle(g.circles[c], x)) {
            g.image.at(i, j) = g.circles[c].fg;
            g.truth.at(i, j) = static_cast<std::uint16_t>(c + 1);
          }
        }
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

namespace {

struct PgmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t payload_offset = 0;
};

// Reads one whitespace/comment-separated token, tracking the byte offset for
// error reporting.
std::string next_token(const std::string& data, std::size_t& pos) {
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  if (start == pos) throw MalformedFile(start, "unexpected end of header");
  return data.substr(start, pos - start);
}

int parse_int(const std::string& tok, std::size_t offset, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw MalformedFile(offset, std::string("cannot parse ") + what + " from \"" + tok + "\"");
  }
}

PgmHeader parse_pgm_header(const std::string& data) {
  std::size_t pos = 0;
  const std::string magic = next_token(data, pos);
  if (magic == "P2" || magic == "P3" || magic == "P6") {
    throw UnsupportedFormat("only binary grayscale PGM (P5) is supported, got " + magic);
  }
  if (magic != "P5") throw MalformedFile(0, "not a PGM file (missing P5 magic)");

  PgmHeader h;
  std::size_t at = pos;
  h.width = parse_int(next_token(data, pos), at, "width");
  at = pos;
  h.height = parse_int(next_token(data, pos), at, "height");
  at = pos;
  h.maxval = parse_int(next_token(data, pos), at, "maxval");
  if (h.width <= 0 || h.height <= 0) throw MalformedFile(at, "non-positive dimensions");
  if (h.maxval <= 0 || h.maxval > 65535) throw MalformedFile(at, "maxval out of range");
  if (pos >= data.size()) throw MalformedFile(pos, "missing pixel payload");
  h.payload_offset = pos + 1;  // exactly one whitespace byte before the payload
  return h;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void check_payload(const PgmHeader& h, std::size_t actual, int bytes_per_sample) {
  const std::size_t expected =
      static_cast<std::size_t>(h.width) * h.height * bytes_per_sample;
  if (actual < expected) {
    throw MalformedFile(h.payload_offset + actual,
                        "truncated pixel payload: expected " + std::to_string(expected) +
                            " bytes, got " + std::to_string(actual));
  }
}

}  // namespace

GrayImage read_image(const fs::path& path) {
  const std::string data = slurp(path);
  const PgmHeader h = parse_pgm_header(data);
  const int bps = h.maxval < 256 ? 1 : 2;
  check_payload(h, data.size() - h.payload_offset, bps);

  GrayImage img(h.width, h.height);
  const unsigned char* p =
      reinterpret_cast<const unsigned char*>(data.data()) + h.payload_offset;
  const double scale = 1.0 / h.maxval;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const int sample =
        bps == 1 ? p[i] : p[2 * i] * 256 + p[2 * i + 1];  // 16-bit samples are big-endian
    if (sample > h.maxval) {
      throw MalformedFile(h.payload_offset + i * bps,
                          "sample " + std::to_string(sample) + " exceeds maxval " +
                              std::to_string(h.maxval));
    }
    img.pixels[i] = sample * scale;
  }
  img.validate();
  return img;
}

void write_image(const GrayImage& img, const fs::path& path) {
  img.validate();
  std::string payload;
  payload.reserve(img.pixel_count() * 2);
  for (double v : img.pixels) {
    const int q = static_cast<int>(std::lround(v * 65535.0));
    payload.push_back(static_cast<char>((q >> 8) & 0xff));
    payload.push_back(static_cast<char>(q & 0xff));
  }
  std::ostringstream os;
  os << "P5\n" << img.width << ' ' << img.height << "\n65535\n" << payload;
  atomic_write(path, os.str());
}

LabelMask read_mask(const fs::path& path) {
  const std::string data = slurp(path);
  const PgmHeader h = parse_pgm_header(data);
  const int bps = h.maxval < 256 ? 1 : 2;
  check_payload(h, data.size() - h.payload_offset, bps);
  LabelMask mask(h.width, h.height);
  const unsigned char* p =
      reinterpret_cast<const unsigned char*>(data.data()) + h.payload_offset;
  for (std::size_t i = 0; i < mask.labels.size(); ++i) {
    mask.labels[i] = bps == 1 ? p[i] : static_cast<std::uint16_t>(p[2 * i] * 256 + p[2 * i + 1]);
  }
  return mask;
}

void write_mask(const LabelMask& mask, const fs::path& path) {
  std::uint16_t top = 0;
  for (std::uint16_t v : mask.labels) top = std::max(top, v);
  const bool wide = top > 255;
  std::string payload;
  payload.reserve(mask.labels.size() * (wide ? 2 : 1));
  for (std::uint16_t v : mask.labels) {
    if (wide) payload.push_back(static_cast<char>((v >> 8) & 0xff));
    payload.push_back(static_cast<char>(v & 0xff));
  }
  std::ostringstream os;
  os << "P5\n" << mask.width << ' ' << mask.height << '\n' << (wide ? 65535 : 255) << '\n'
     << payload;
  atomic_write(path, os.str());
}

namespace {
constexpr int kCheckpointVersion = 1;
}

void save_checkpoint(const MultiphaseModel& model, const fs::path& path) {
  model.validate();
  nlohmann::json j;
  j["version"] = kCheckpointVersion;
  j["m"] = model.m;
  j["n1"] = model.n1;
  j["epsilon"] = model.epsilon.epsilon;
  nlohmann::json nets = nlohmann::json::array();
  for (const LayerParams& p : model.levelsets) {
    nlohmann::json n;
    n["a"] = p.a;
    n["b"] = p.b;
    nlohmann::json w = nlohmann::json::array();
    for (Vec2 v : p.w) w.push_back({v.x, v.y});
    n["W"] = w;
    nets.push_back(n);
  }
  j["levelsets"] = nets;
  nlohmann::json constants;
  for (std::size_t idx = 0; idx < model.pattern_count(); ++idx) {
    constants[SignPattern::from_index(model.m, idx).to_string()] = model.constants[idx];
  }
  j["constants"] = constants;
  atomic_write(path, j.dump(2) + "\n");
}

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) throw SchemaError(name);
  return *it;
}

}  // namespace

MultiphaseModel load_checkpoint(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedFile(e.byte, std::string("invalid checkpoint JSON: ") + e.what());
  }
  const int version = field(j, "version").get<int>();
  if (version != kCheckpointVersion) throw VersionMismatch(version, kCheckpointVersion);

  MultiphaseModel model;
  model.m = field(j, "m").get<int>();
  model.n1 = field(j, "n1").get<int>();
  model.epsilon = Smoothing(field(j, "epsilon").get<double>());
  for (const auto& n : field(j, "levelsets")) {
    LayerParams p;
    p.a = field(n, "a").get<std::vector<double>>();
    p.b = field(n, "b").get<std::vector<double>>();
    for (const auto& row : field(n, "W")) {
      p.w.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
    }
    model.levelsets.push_back(std::move(p));
  }
  const auto& constants = field(j, "constants");
  model.constants.assign(model.pattern_count(), 0.0);
  for (std::size_t idx = 0; idx < model.pattern_count(); ++idx) {
    const std::string key = SignPattern::from_index(model.m, idx).to_string();
    const auto it = constants.find(key);
    if (it == constants.end()) throw SchemaError("constants." + key);
    model.constants[idx] = it->get<double>();
  }
  model.validate();
  return model;
}

double dice(const LabelMask& a, const LabelMask& b, std::uint16_t label) {
  if (a.width != b.width || a.height != b.height) {
    throw DimMismatch("masks must share dimensions");
  }
  std::size_t both = 0, in_a = 0, in_b = 0;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    const bool pa = a.labels[i] == label;
    const bool pb = b.labels[i] == label;
    in_a += pa;
    in_b += pb;
    both += pa && pb;
  }
  if (in_a + in_b == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(in_a + in_b);
}

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace nncv
