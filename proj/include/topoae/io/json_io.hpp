#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "topoae/dr/autoencoder.hpp"
#include "topoae/dr/train.hpp"
#include "topoae/eval/quality.hpp"
#include "topoae/io/csv.hpp"
#include "topoae/ph/diagram.hpp"

namespace topoae::io {

using Json = nlohmann::json;

namespace detail {

// JSON has no infinity or NaN; both become null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline double number_or(const Json& j, double missing) { return j.is_null() ? missing : j.get<double>(); }

inline Json matrix_json(const Matrix& m) {
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

inline Matrix matrix_from(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>(), cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw ValidationError("checkpoint: matrix size mismatch");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

inline Json layers_json(const std::vector<Layer>& net) {
  Json a = Json::array();
  for (const auto& l : net) {
    Json j{{"w", matrix_json(l.w)}, {"b", matrix_json(l.b)}, {"relu", l.relu}, {"batch_norm", l.norm}};
    if (l.norm)
      j["bn"] = Json{{"gamma", matrix_json(l.gamma)}, {"beta", matrix_json(l.beta)}, {"mean", matrix_json(l.mean)},
                     {"var", matrix_json(l.var)}, {"eps", l.bn_eps}};
    a.push_back(std::move(j));
  }
  return a;
}

inline void layers_from(const Json& a, std::vector<Layer>& net) {
  if (!a.is_array() || a.size() != net.size()) throw ValidationError("checkpoint: layer count mismatch");
  for (std::size_t i = 0; i < net.size(); ++i) {
    const Json& j = a[i];
    Layer& l = net[i];
    Matrix w = matrix_from(j.at("w")), b = matrix_from(j.at("b"));
    if (w.rows() != l.w.rows() || w.cols() != l.w.cols() || b.cols() != l.b.cols())
      throw ValidationError("checkpoint: layer shape mismatch");
    l.w = std::move(w);
    l.b = std::move(b);
    if (l.norm) {
      const Json& bn = j.at("bn");
      l.gamma = matrix_from(bn.at("gamma"));
      l.beta = matrix_from(bn.at("beta"));
      l.mean = matrix_from(bn.at("mean"));
      l.var = matrix_from(bn.at("var"));
      l.bn_eps = bn.at("eps").get<double>();
    }
  }
}

}  // namespace detail

inline Json diagram_json(const PersistenceDiagram& d) {
  Json pairs = Json::array();
  for (const auto& p : d.pairs()) {
    Json j{{"birth", detail::number(p.birth)}, {"death", detail::number(p.death)},
           {"birth_simplex", p.birth_simplex}, {"death_simplex", p.death_simplex}};
    pairs.push_back(std::move(j));
  }
  return Json{{"dim", d.dim()}, {"pairs", std::move(pairs)}};
}

inline PersistenceDiagram diagram_from_json(const Json& j) {
  const int dim = j.at("dim").get<int>();
  PersistenceDiagram d(dim);
  for (const Json& p : j.at("pairs")) {
    PersistencePair q;
    q.dim = dim;
    q.birth = detail::number_or(p.at("birth"), 0.0);
    q.death = detail::number_or(p.at("death"), kInfinity);
    if (p.contains("birth_simplex")) q.birth_simplex = p["birth_simplex"].get<std::vector<Index>>();
    if (p.contains("death_simplex")) q.death_simplex = p["death_simplex"].get<std::vector<Index>>();
    if (!(q.birth <= q.death)) throw ValidationError("diagram json: death before birth");
    d.add(std::move(q));
  }
  d.sort();
  return d;
}

inline Json quality_json(const QualityReport& q) {
  return Json{{"MW0", detail::number(q.mw0)}, {"MW1", detail::number(q.mw1)}, {"MD", detail::number(q.md)},
              {"LC", detail::number(q.lc)},   {"TA", detail::number(q.ta)},   {"Trust", detail::number(q.trust)},
              {"Cont", detail::number(q.cont)}, {"K", q.k},                   {"seconds", q.seconds}};
}

inline constexpr int kCheckpointVersion = 1;

inline Json model_json(const Autoencoder& m) {
  const auto& c = m.config();
  return Json{{"format", "topoae-autoencoder"},
              {"version", kCheckpointVersion},
              {"input_dim", m.input_dim()},
              {"hidden", c.hidden},
              {"latent", c.latent},
              {"batch_norm", c.batch_norm},
              {"seed", c.seed},
              {"input_shift", detail::matrix_json(m.input_shift())},
              {"input_scale", detail::matrix_json(m.input_scale())},
              {"encoder", detail::layers_json(m.encoder())},
              {"decoder", detail::layers_json(m.decoder())}};
}

inline Autoencoder model_from_json(const Json& j) {
  if (j.value("format", "") != "topoae-autoencoder") throw ValidationError("not an autoencoder checkpoint");
  if (j.value("version", 0) != kCheckpointVersion) throw ValidationError("unsupported checkpoint version");
  AutoencoderConfig c;
  c.hidden = j.at("hidden").get<std::vector<int>>();
  c.latent = j.at("latent").get<int>();
  c.batch_norm = j.at("batch_norm").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  Autoencoder m(j.at("input_dim").get<int>(), c);
  m.set_standardization(detail::matrix_from(j.at("input_shift")), detail::matrix_from(j.at("input_scale")));
  detail::layers_from(j.at("encoder"), m.encoder());
  detail::layers_from(j.at("decoder"), m.decoder());
  return m;
}

inline Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline void write_json(const std::string& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

/// iter,L_r,L_t,total,MW0,MW1 with empty cells where a value was not taken.
inline void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  out << "iter,L_r,L_t,total,MW0,MW1\n";
  for (const auto& r : trace)
    out << r.iter << ',' << cell(r.reconstruction) << ',' << cell(r.topological) << ',' << cell(r.total) << ','
        << cell(r.mw0) << ',' << cell(r.mw1) << '\n';
}

inline void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  write_file(path, os.str());
}

}  // namespace topoae::io
