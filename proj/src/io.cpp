#include "mfe/io.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <vector>

namespace mfe {

namespace {
constexpr char kMagic[4] = {'M', 'F', 'E', '1'};
}

void write_field(std::ostream& os, const Field& f) {
  os.write(kMagic, 4);
  const std::uint32_t n = static_cast<std::uint32_t>(f.grid().n);
  os.write(reinterpret_cast<const char*>(&n), 4);
  for (int i = 0; i < f.grid().n; ++i)
    for (int j = 0; j < f.grid().n; ++j) {
      const double v = f(i, j);
      os.write(reinterpret_cast<const char*>(&v), 8);
    }
  if (!os) throw Error("field write failed");
}

Field read_field(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != std::string(kMagic, 4))
    throw Error("bad field container magic");
  std::uint32_t n = 0;
  is.read(reinterpret_cast<char*>(&n), 4);
  if (!is || n < 16 || n % 2 != 0) throw Error("bad field container size");
  Grid g(static_cast<int>(n));
  Eigen::ArrayXXd v(g.n, g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      double x;
      is.read(reinterpret_cast<char*>(&x), 8);
      if (!is) throw Error("truncated field container");
      v(i, j) = x;
    }
  return Field(g, std::move(v));
}

void write_field(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  write_field(os, f);
}

Field read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_field(is);
}

void write_csv(std::ostream& os, const Field& f) {
  os << "x,y,value\n";
  os << std::setprecision(17);
  const double h = f.grid().spacing();
  for (int i = 0; i < f.grid().n; ++i)
    for (int j = 0; j < f.grid().n; ++j)
      os << i * h << ',' << j * h << ',' << f(i, j) << '\n';
  if (!os) throw Error("csv write failed");
}

void write_csv(const std::string& path, const Field& f) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  write_csv(os, f);
}

}  // namespace mfe
