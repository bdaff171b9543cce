#include "firesig/image_io.hpp"

#include "firesig/error.hpp"

#include <png.h>

#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace firesig {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// PGM header tokens may be separated by arbitrary whitespace and '#' comments.
class PgmTokenizer {
 public:
  explicit PgmTokenizer(const std::string& bytes) : bytes_(bytes) {}

  std::string next() {
    skip_space_and_comments();
    std::string tok;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) tok += bytes_[pos_++];
    if (tok.empty()) throw Error(ErrorKind::Io, "truncated PGM header");
    return tok;
  }

  int next_int() {
    auto tok = next();
    try {
      std::size_t used = 0;
      int v = std::stoi(tok, &used);
      if (used != tok.size()) throw Error(ErrorKind::Io, "bad PGM integer '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Io, "bad PGM integer '" + tok + "'");
    }
  }

  // After maxval exactly one whitespace byte precedes binary data.
  std::size_t binary_start() const { return pos_ + 1; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

ShapeMask parse_pgm(const std::string& bytes, const std::string& name) {
  PgmTokenizer tok(bytes);
  const auto magic = tok.next();
  if (magic != "P2" && magic != "P5") throw Error(ErrorKind::Io, name + ": not a P2/P5 PGM");
  const int w = tok.next_int();
  const int h = tok.next_int();
  const int maxval = tok.next_int();
  if (w <= 0 || h <= 0) throw Error(ErrorKind::Io, name + ": bad dimensions");
  if (maxval <= 0 || maxval > 255) throw Error(ErrorKind::Io, name + ": only maxval <= 255 is supported");
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  // Rescale so the >= 128 threshold refers to the 0..255 range.
  auto is_fg = [maxval](int v) { return v * 255 >= kForegroundThreshold * maxval; };
  std::vector<std::uint8_t> cells(n);
  if (magic == "P5") {
    const auto start = tok.binary_start();
    if (bytes.size() < start + n) throw Error(ErrorKind::Io, name + ": truncated pixel data");
    for (std::size_t i = 0; i < n; ++i) cells[i] = is_fg(static_cast<unsigned char>(bytes[start + i]));
  } else {
    for (std::size_t i = 0; i < n; ++i) cells[i] = is_fg(tok.next_int());
  }
  return ShapeMask(w, h, std::move(cells));
}

}  // namespace

ShapeMask read_pgm(const std::filesystem::path& path) { return parse_pgm(slurp(path), path.string()); }

ShapeMask read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str()))
    throw Error(ErrorKind::Io, path.string() + ": " + image.message);
  image.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorKind::Io, path.string() + ": " + image.message);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  std::vector<std::uint8_t> cells(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) cells[i] = buffer[i] >= kForegroundThreshold;
  return ShapeMask(w, h, std::move(cells));
}

ShapeMask read_mask(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  char head[8] = {};
  in.read(head, sizeof head);
  if (in.gcount() >= 8 && static_cast<unsigned char>(head[0]) == 0x89 && head[1] == 'P' && head[2] == 'N' &&
      head[3] == 'G')
    return read_png(path);
  return read_pgm(path);
}

std::string encode_pgm(const ShapeMask& mask) {
  std::ostringstream out;
  out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  std::string body(mask.data().size(), '\0');
  for (std::size_t i = 0; i < body.size(); ++i) body[i] = mask.data()[i] ? static_cast<char>(255) : 0;
  out << body;
  return out.str();
}

void write_pgm(const std::filesystem::path& path, const ShapeMask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  const auto bytes = encode_pgm(mask);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace firesig
