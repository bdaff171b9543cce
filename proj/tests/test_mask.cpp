#include "oracles.hpp"

#include "firesig/error.hpp"
#include "firesig/image_io.hpp"
#include "firesig/mask.hpp"

#include <doctest.h>
#include <png.h>

using namespace firesig;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Config;
}

}  // namespace

TEST_SUITE("mask") {

TEST_CASE("centroid of a 3x3 block is its middle pixel") {
  const auto m = oracle::box(3, 3, 0, 0, 2, 2);
  const auto c = compute_centroid(m);
  CHECK(c.x == 1.0);
  CHECK(c.y == 1.0);
}

TEST_CASE("centroid of a single pixel") {
  ShapeMask m(16, 16);
  m.set(5, 7, true);
  const auto c = compute_centroid(m);
  CHECK(c.x == 5.0);
  CHECK(c.y == 7.0);
}

TEST_CASE("centroid of an L of three pixels") {
  ShapeMask m(4, 4);
  m.set(0, 0, true);
  m.set(0, 1, true);
  m.set(1, 0, true);
  const auto c = compute_centroid(m);
  CHECK(c.x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(c.y == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("empty mask has no centroid") {
  ShapeMask m(10, 10);
  CHECK(kind_of([&] { compute_centroid(m); }) == ErrorKind::EmptyMask);
}

TEST_CASE("validity: minimum side and foreground") {
  CHECK(kind_of([] { oracle::box(7, 20, 0, 0, 6, 19).check_valid(); }) == ErrorKind::DegenerateShape);
  ShapeMask few(20, 20);
  for (int i = 0; i < 15; ++i) few.set(i, 0, true);
  CHECK(kind_of([&] { few.check_valid(); }) == ErrorKind::DegenerateShape);
  few.set(15, 0, true);
  CHECK_NOTHROW(few.check_valid());
  CHECK(kind_of([] { ShapeMask(0, 5); }) == ErrorKind::DegenerateShape);
}

TEST_CASE("8-connected components") {
  ShapeMask m(10, 10);
  m.set(1, 1, true);
  m.set(2, 2, true);  // diagonal neighbour: same component
  CHECK(count_components(m) == 1);
  m.set(7, 7, true);
  CHECK(count_components(m) == 2);
}

TEST_CASE("bilinear sample") {
  ShapeMask m(4, 4);
  m.set(1, 1, true);
  CHECK(m.sample(1.0, 1.0) == 1.0);
  CHECK(m.sample(1.5, 1.0) == 0.5);
  CHECK(m.sample(1.5, 1.5) == 0.25);
  CHECK(m.sample(-3.0, 1.0) == 0.0);
}

TEST_CASE("pad keeps the shape and shifts the centroid") {
  const auto m = oracle::box(20, 20, 4, 5, 10, 12);
  const auto p = pad_mask(m, 8);
  CHECK(p.width() == 36);
  CHECK(p.foreground_count() == m.foreground_count());
  CHECK(compute_centroid(p).x == compute_centroid(m).x + 8);
}

TEST_CASE("rotation by 90 degrees about the center maps a bar onto a bar") {
  const auto bar = oracle::box(41, 41, 10, 18, 30, 22);  // horizontal
  const auto r = rotate_mask(bar, 90.0, compute_centroid(bar));
  const auto want = oracle::box(41, 41, 18, 10, 22, 30);
  CHECK(r == want);
}

TEST_CASE("scale by 2 doubles the side") {
  const auto m = oracle::box(20, 20, 5, 5, 14, 14);
  const auto s = scale_mask(m, 2.0);
  CHECK(s.width() == 40);
  CHECK(s.foreground_count() == doctest::Approx(4.0 * m.foreground_count()).epsilon(0.1));
}

}  // TEST_SUITE

TEST_SUITE("image_io") {

TEST_CASE("PGM round trip") {
  const auto dir = oracle::scratch_dir("pgm");
  const auto m = oracle::disk(33, 21, 16, 10, 8);
  write_pgm(dir / "a.pgm", m);
  CHECK(read_pgm(dir / "a.pgm") == m);
  CHECK(read_mask(dir / "a.pgm") == m);
  CHECK(oracle::slurp(dir / "a.pgm") == encode_pgm(m));
}

TEST_CASE("ASCII PGM with comments and a small maxval") {
  const auto dir = oracle::scratch_dir("p2");
  oracle::spit(dir / "b.pgm", "P2\n# comment\n3 2\n# another\n10\n0 5 10\n4 6 0\n");
  const auto m = read_pgm(dir / "b.pgm");
  CHECK(m.width() == 3);
  CHECK(!m.at(0, 0));
  CHECK(!m.at(1, 0));  // 5/10 is just under 128/255
  CHECK(m.at(2, 0));
  CHECK(!m.at(0, 1));
  CHECK(m.at(1, 1));
}

TEST_CASE("malformed PGM is an I/O error") {
  const auto dir = oracle::scratch_dir("badpgm");
  oracle::spit(dir / "c.pgm", "P5\n4 4\n255\nab");
  CHECK(kind_of([&] { read_pgm(dir / "c.pgm"); }) == ErrorKind::Io);
  oracle::spit(dir / "d.pgm", "P6\n1 1\n255\nabc");
  CHECK(kind_of([&] { read_pgm(dir / "d.pgm"); }) == ErrorKind::Io);
  CHECK(kind_of([&] { read_mask(dir / "missing.pgm"); }) == ErrorKind::Io);
}

TEST_CASE("PNG masks are read through libpng") {
  const auto dir = oracle::scratch_dir("png");
  const auto m = oracle::disk(30, 24, 15, 12, 9);
  std::vector<std::uint8_t> gray(m.data().begin(), m.data().end());
  for (auto& g : gray) g = g ? 255 : 0;
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = 30;
  img.height = 24;
  img.format = PNG_FORMAT_GRAY;
  const auto path = (dir / "m.png").string();
  REQUIRE(png_image_write_to_file(&img, path.c_str(), 0, gray.data(), 0, nullptr) != 0);
  CHECK(read_png(path) == m);
  CHECK(read_mask(path) == m);
}

}  // TEST_SUITE
