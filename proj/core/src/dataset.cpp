#include "steinmetz/dataset.hpp"

#include <cmath>
#include <cstring>
#include <nlohmann/json.hpp>

#include "steinmetz/binary_io.hpp"
#include "steinmetz/errors.hpp"
#include "steinmetz/rng.hpp"
#include "steinmetz/signal.hpp"

namespace steinmetz {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kMeta = "meta.json";
constexpr const char* kFeaturesRe = "features_re.bin";
constexpr const char* kFeaturesIm = "features_im.bin";
constexpr const char* kLabels = "labels.bin";

template <typename T>
T meta_field(const json& meta, const char* key, const fs::path& path) {
  if (!meta.contains(key)) throw DataError(path.string() + ": meta.json lacks field '" + key + "'");
  try {
    return meta.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(path.string() + ": meta.json field '" + key + "' has the wrong type");
  }
}

Tensor read_matrix(const fs::path& file, std::size_t rows, std::size_t cols, const char* field) {
  const auto bytes = io::read_file(file);
  const std::size_t row_bytes = cols * 8;
  if (row_bytes == 0 || bytes.size() % row_bytes != 0) {
    throw DataError(file.string() + ": length mismatch in " + field + " (" +
                    std::to_string(bytes.size()) + " bytes is not a whole number of " +
                    std::to_string(cols) + "-column f64 rows)");
  }
  if (bytes.size() / row_bytes != rows) {
    throw DataError(file.string() + ": header mismatch in " + field + " (meta.json M=" +
                    std::to_string(rows) + " but the blob holds " +
                    std::to_string(bytes.size() / row_bytes) + " rows)");
  }
  std::vector<double> values = io::decode_f64_le(bytes);
  for (double v : values)
    if (!std::isfinite(v)) throw DataError(file.string() + ": non-finite value in " + field);
  return Tensor::adopt({rows, cols}, std::move(values));
}

}  // namespace

void Dataset::validate() const {
  if (features_re.rank() != 2 || features_re.rows() == 0) throw DataError("dataset has no feature rows");
  if (!features_re.same_shape(features_im)) throw DataError("features_re and features_im shapes differ");
  if (k == 0) throw DataError("dataset k must be positive");
  const std::size_t m = size();
  if (task == Task::Classification) {
    if (labels.size() != m) {
      throw DataError("labels: " + std::to_string(labels.size()) + " labels for " + std::to_string(m) + " rows");
    }
    for (auto y : labels)
      if (y >= k) throw DataError("labels: class id " + std::to_string(y) + " >= k=" + std::to_string(k));
  } else {
    if (targets.rank() != 2 || targets.rows() != m || targets.cols() != 2 * k) {
      throw DataError("targets: expected [" + std::to_string(m) + "x" + std::to_string(2 * k) + "], got " +
                      shape_string(targets.shape()));
    }
  }
}

Tensor gather_rows(const Tensor& t, std::span<const std::size_t> rows) {
  const std::size_t cols = t.cols();
  std::vector<double> out;
  out.reserve(rows.size() * cols);
  for (auto r : rows) {
    if (r >= t.rows()) throw DimensionError("gather_rows: row index out of range");
    const auto src = t.row(r);
    out.insert(out.end(), src.begin(), src.end());
  }
  return Tensor::adopt({rows.size(), cols}, std::move(out));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features_re = gather_rows(features_re, rows);
  out.features_im = gather_rows(features_im, rows);
  out.task = task;
  out.k = k;
  out.provenance = provenance;
  out.real_form = real_form;
  if (task == Task::Classification) {
    out.labels.reserve(rows.size());
    for (auto r : rows) out.labels.push_back(labels.at(r));
  } else {
    out.targets = gather_rows(targets, rows);
  }
  return out;
}

Dataset Dataset::head(std::size_t n) const {
  if (n > size()) {
    throw DataError("requested the first " + std::to_string(n) + " rows of a " + std::to_string(size()) +
                    "-row dataset");
  }
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  Dataset out = subset(rows);
  return out;
}

Dataset dft_encode(const Dataset& real) {
  real.validate();
  const std::size_t m = real.size(), n = real.input_dim();
  std::vector<double> re(m * n), im(m * n);
  for (std::size_t r = 0; r < m; ++r) {
    const auto row_re = real.features_re.row(r);
    const auto row_im = real.features_im.row(r);
    const signal::ComplexVector spectrum = signal::dft(signal::ComplexVector(
        std::vector<double>(row_re.begin(), row_re.end()), std::vector<double>(row_im.begin(), row_im.end())));
    std::copy(spectrum.re.begin(), spectrum.re.end(), re.begin() + static_cast<std::ptrdiff_t>(r * n));
    std::copy(spectrum.im.begin(), spectrum.im.end(), im.begin() + static_cast<std::ptrdiff_t>(r * n));
  }
  Dataset out = real;
  out.features_re = Tensor({m, n}, std::move(re));
  out.features_im = Tensor({m, n}, std::move(im));
  out.real_form = false;
  out.provenance = real.provenance.empty() ? "dft-encode" : real.provenance + " | dft-encode";
  return out;
}

Dataset add_complex_noise(const Dataset& ds, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ContractError("noise scale eta must be non-negative");
  if (eta == 0.0) return ds;
  ds.validate();
  Rng rng = Rng::substream(seed, "noise");
  const double sigma = eta * std::sqrt(0.5);
  std::vector<double> re(ds.features_re.data().begin(), ds.features_re.data().end());
  std::vector<double> im(ds.features_im.data().begin(), ds.features_im.data().end());
  for (std::size_t i = 0; i < re.size(); ++i) {
    re[i] += sigma * rng.normal();
    im[i] += sigma * rng.normal();
  }
  Dataset out = ds;
  out.features_re = Tensor(ds.features_re.shape(), std::move(re));
  out.features_im = Tensor(ds.features_im.shape(), std::move(im));
  out.real_form = false;
  out.provenance = ds.provenance + " | noise eta=" + json(eta).dump() + " seed=" + std::to_string(seed);
  return out;
}

Dataset load_cvds(const fs::path& dir) {
  const fs::path meta_path = dir / kMeta;
  if (!fs::exists(meta_path)) throw DataError("missing CVDS metadata '" + meta_path.string() + "'");
  json meta;
  try {
    const auto bytes = io::read_file(meta_path);
    meta = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw DataError(meta_path.string() + ": invalid JSON (" + e.what() + ")");
  }

  const auto m = meta_field<std::size_t>(meta, "M", dir);
  const auto dn = meta_field<std::size_t>(meta, "dN", dir);
  const auto k = meta_field<std::size_t>(meta, "k", dir);
  const auto dtype = meta_field<std::string>(meta, "dtype", dir);
  const auto endianness = meta_field<std::string>(meta, "endianness", dir);
  if (dtype != "f64") throw DataError(dir.string() + ": meta.json dtype must be \"f64\", got \"" + dtype + "\"");
  if (endianness != "little") throw DataError(dir.string() + ": meta.json endianness must be \"little\"");
  if (m == 0 || dn == 0) throw DataError(dir.string() + ": meta.json M and dN must be positive");

  Dataset ds;
  try {
    ds.task = parse_task(meta_field<std::string>(meta, "task", dir));
  } catch (const ContractError& e) {
    throw DataError(dir.string() + ": meta.json field 'task': " + e.what());
  }
  ds.k = k;
  ds.provenance = meta.value("provenance", std::string{});
  // Without an explicit "form", a missing features_im.bin marks the real form.
  ds.real_form = meta.contains("form") ? meta.value("form", std::string{}) == "real"
                                       : !fs::exists(dir / kFeaturesIm);

  for (const char* f : {kFeaturesRe, kLabels}) {
    if (!fs::exists(dir / f)) throw DataError("missing CVDS file '" + (dir / f).string() + "'");
  }
  ds.features_re = read_matrix(dir / kFeaturesRe, m, dn, "features_re");
  if (ds.real_form) {
    ds.features_im = Tensor::zeros({m, dn});
  } else {
    if (!fs::exists(dir / kFeaturesIm)) throw DataError("missing CVDS file '" + (dir / kFeaturesIm).string() + "'");
    ds.features_im = read_matrix(dir / kFeaturesIm, m, dn, "features_im");
  }

  if (ds.task == Task::Classification) {
    const auto bytes = io::read_file(dir / kLabels);
    if (bytes.size() % 4 != 0) throw DataError((dir / kLabels).string() + ": length mismatch in labels");
    ds.labels = io::decode_u32_le(bytes);
    if (ds.labels.size() != m) {
      throw DataError((dir / kLabels).string() + ": header mismatch in labels (meta.json M=" + std::to_string(m) +
                      " but the blob holds " + std::to_string(ds.labels.size()) + " labels)");
    }
  } else {
    ds.targets = read_matrix(dir / kLabels, m, 2 * k, "labels");
  }
  ds.validate();
  return ds;
}

void save_cvds(const Dataset& ds, const fs::path& dir) {
  ds.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());

  json meta = {{"M", ds.size()},
               {"dN", ds.input_dim()},
               {"k", ds.k},
               {"task", std::string(to_string(ds.task))},
               {"dtype", "f64"},
               {"endianness", "little"},
               {"form", ds.real_form ? "real" : "complex"},
               {"provenance", ds.provenance}};
  const std::string text = meta.dump(2) + "\n";
  io::write_file(dir / kMeta, std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
  io::write_file(dir / kFeaturesRe, io::encode_f64_le(ds.features_re.data()));
  if (ds.real_form) {
    fs::remove(dir / kFeaturesIm, ec);
  } else {
    io::write_file(dir / kFeaturesIm, io::encode_f64_le(ds.features_im.data()));
  }
  if (ds.task == Task::Classification) {
    io::write_file(dir / kLabels, io::encode_u32_le(ds.labels));
  } else {
    io::write_file(dir / kLabels, io::encode_f64_le(ds.targets.data()));
  }
}

bool bitwise_equal(const Dataset& a, const Dataset& b) {
  return bitwise_equal(a.features_re, b.features_re) && bitwise_equal(a.features_im, b.features_im) &&
         a.task == b.task && a.k == b.k && a.labels == b.labels && bitwise_equal(a.targets, b.targets) &&
         a.real_form == b.real_form;
}

}  // namespace steinmetz
