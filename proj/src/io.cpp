#include "mdct/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mdct/errors.hpp"

namespace mdct {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& tok, const std::string& path, long line_no) {
  double v = 0.0;
  const char* b = tok.data();
  const char* e = b + tok.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc()) {
    throw data_error(path + ":" + std::to_string(line_no) + ": not a number: '" + tok + "'");
  }
  return v;
}

std::string trimmed(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw data_error(path + ": empty file");
  const auto header = split_csv_line(trimmed(line));
  if (header.size() < 3 || header[0] != "s1") {
    throw data_error(path + ": expected header s1[,s2],y,x_1..x_p");
  }
  const int dim = header.size() > 1 && header[1] == "s2" ? 2 : 1;
  const std::size_t y_col = static_cast<std::size_t>(dim);
  if (header.size() <= y_col || header[y_col] != "y") {
    throw data_error(path + ": expected column 'y' after the coordinates");
  }
  const int p = static_cast<int>(header.size() - y_col - 1);
  if (p < 1) throw data_error(path + ": at least one predictor column required");

  Dataset data;
  data.dim = dim;
  std::vector<double> ys;
  std::vector<double> xs;  // row-major
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trimmed(line);
    if (t.empty()) continue;
    const auto toks = split_csv_line(t);
    if (toks.size() != header.size()) {
      throw data_error(path + ":" + std::to_string(line_no) + ": wrong field count");
    }
    Point s;
    s.x = parse_double(toks[0], path, line_no);
    if (dim == 2) s.y = parse_double(toks[1], path, line_no);
    data.locations.push_back(s);
    ys.push_back(parse_double(toks[y_col], path, line_no));
    for (int k = 0; k < p; ++k) {
      xs.push_back(parse_double(toks[y_col + 1 + static_cast<std::size_t>(k)], path, line_no));
    }
  }
  const long n = static_cast<long>(ys.size());
  if (n == 0) throw data_error(path + ": no data rows");
  data.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  data.X.resize(n, p);
  for (long i = 0; i < n; ++i) {
    for (int k = 0; k < p; ++k) {
      data.X(i, k) = xs[static_cast<std::size_t>(i * p + k)];
    }
  }
  return data;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write dataset file: " + path);
  out << "s1";
  if (data.dim == 2) out << ",s2";
  out << ",y";
  for (int k = 1; k <= data.p(); ++k) out << ",x_" << k;
  out << "\n";
  for (long i = 0; i < data.n(); ++i) {
    out << fmt_double(data.locations[static_cast<std::size_t>(i)].x);
    if (data.dim == 2) out << ',' << fmt_double(data.locations[static_cast<std::size_t>(i)].y);
    out << ',' << fmt_double(data.y[i]);
    for (int k = 0; k < data.p(); ++k) out << ',' << fmt_double(data.X(i, k));
    out << "\n";
  }
  if (!out) throw data_error("failed while writing: " + path);
}

BinaryDataset read_binary_dataset_csv(const std::string& path) {
  const Dataset raw = read_dataset_csv(path);
  BinaryDataset data;
  data.X = raw.X;
  data.locations = raw.locations;
  data.dim = raw.dim;
  data.y.resize(static_cast<std::size_t>(raw.n()));
  for (long i = 0; i < raw.n(); ++i) {
    const double v = raw.y[i];
    if (v != 0.0 && v != 1.0) {
      throw data_error(path + ": probit responses must be exactly 0 or 1");
    }
    data.y[static_cast<std::size_t>(i)] = v == 1.0 ? 1 : 0;
  }
  return data;
}

std::vector<double> read_truth_csv(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open truth file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw data_error(path + ": empty file");
  const auto header = split_csv_line(trimmed(line));
  const std::size_t expected = static_cast<std::size_t>(dim) + 1;
  if (header.size() != expected || header[0] != "s1" ||
      header[expected - 1] != "w0" || (dim == 2 && header[1] != "s2")) {
    throw data_error(path + ": expected header s1[,s2],w0");
  }
  std::vector<double> w0;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trimmed(line);
    if (t.empty()) continue;
    const auto toks = split_csv_line(t);
    if (toks.size() != expected) {
      throw data_error(path + ":" + std::to_string(line_no) + ": wrong field count");
    }
    w0.push_back(parse_double(toks[expected - 1], path, line_no));
  }
  return w0;
}

void write_truth_csv(const std::string& path, const std::vector<Point>& locations,
                     const std::vector<double>& w0, int dim) {
  if (locations.size() != w0.size()) throw data_error("truth sidecar length mismatch");
  std::ofstream out(path);
  if (!out) throw data_error("cannot write truth file: " + path);
  out << (dim == 2 ? "s1,s2,w0" : "s1,w0") << "\n";
  for (std::size_t i = 0; i < w0.size(); ++i) {
    out << fmt_double(locations[i].x);
    if (dim == 2) out << ',' << fmt_double(locations[i].y);
    out << ',' << fmt_double(w0[i]) << "\n";
  }
}

void write_prediction_csv(const std::string& path, const std::vector<Point>& points,
                          const std::vector<PredictionSummary>& summaries, int dim,
                          bool include_p_mean) {
  if (points.size() != summaries.size()) throw data_error("prediction output length mismatch");
  std::ofstream out(path);
  if (!out) throw data_error("cannot write prediction file: " + path);
  out << (dim == 2 ? "s1,s2," : "s1,")
      << "y_mean,y_median,y_lo95,y_hi95,w_mean,w_lo95,w_hi95";
  if (include_p_mean) out << ",p_mean";
  out << "\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const PredictionSummary& s = summaries[i];
    out << fmt_double(points[i].x);
    if (dim == 2) out << ',' << fmt_double(points[i].y);
    out << ',' << fmt_double(s.y_mean) << ',' << fmt_double(s.y_median) << ','
        << fmt_double(s.y_lo95) << ',' << fmt_double(s.y_hi95) << ',' << fmt_double(s.w_mean)
        << ',' << fmt_double(s.w_lo95) << ',' << fmt_double(s.w_hi95);
    if (include_p_mean) out << ',' << fmt_double(s.p_mean);
    out << "\n";
  }
}

void write_chain(const std::string& path, const ChainSamples& chain) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write chain file: " + path);
  std::ostringstream h;
  h << "mdct_chain 1\n";
  h << "family " << chain.family << "\n";
  h << "seed " << chain.seed << "\n";
  h << "dim " << chain.grid_spec.box.dim << "\n";
  h << "box " << fmt_double(chain.grid_spec.box.lo[0]) << ' '
    << fmt_double(chain.grid_spec.box.hi[0]);
  if (chain.grid_spec.box.dim == 2) {
    h << ' ' << fmt_double(chain.grid_spec.box.lo[1]) << ' '
      << fmt_double(chain.grid_spec.box.hi[1]);
  }
  h << "\n";
  h << "R " << chain.grid_spec.R << "\n";
  h << "J1 " << chain.grid_spec.J1[0];
  if (chain.grid_spec.box.dim == 2) h << ' ' << chain.grid_spec.J1[1];
  h << "\n";
  h << "c " << fmt_double(chain.hyper.c) << "\n";
  h << "a_sigma " << fmt_double(chain.hyper.a_sigma) << "\n";
  h << "b_sigma " << fmt_double(chain.hyper.b_sigma) << "\n";
  h << "h_eta " << chain.hyper.h_eta << "\n";
  h << "n_iter " << chain.n_iter << "\n";
  h << "burn_in " << chain.burn_in << "\n";
  h << "thin " << chain.thin << "\n";
  h << "p " << chain.p << "\n";
  h << "n_basis " << chain.n_basis << "\n";
  h << "n_delta " << chain.n_delta << "\n";
  h << "stored " << chain.stored() << "\n";
  h << "end_header\n";
  const std::string header = h.str();
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  const long stored = chain.stored();
  std::vector<double> record(static_cast<std::size_t>(chain.p + 1 + chain.n_basis + 1 +
                                                      chain.n_delta + 1));
  for (long l = 0; l < stored; ++l) {
    double* w = record.data();
    std::memcpy(w, chain.gamma_draws.data() + l * chain.p,
                sizeof(double) * static_cast<std::size_t>(chain.p));
    w += chain.p;
    *w++ = chain.sigma2_draws[static_cast<std::size_t>(l)];
    std::memcpy(w, chain.beta_draws.data() + l * chain.n_basis,
                sizeof(double) * static_cast<std::size_t>(chain.n_basis));
    w += chain.n_basis;
    *w++ = chain.delta1_draws[static_cast<std::size_t>(l)];
    std::memcpy(w, chain.delta_draws.data() + l * chain.n_delta,
                sizeof(double) * static_cast<std::size_t>(chain.n_delta));
    w += chain.n_delta;
    *w++ = static_cast<double>(chain.eta_draws[static_cast<std::size_t>(l)]);
    out.write(reinterpret_cast<const char*>(record.data()),
              static_cast<std::streamsize>(record.size() * sizeof(double)));
  }
  if (!out) throw data_error("failed while writing: " + path);
}

ChainSamples read_chain(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open chain file: " + path);
  ChainSamples chain;
  std::string line;
  long stored = -1;
  bool magic_seen = false;
  while (std::getline(in, line)) {
    line = trimmed(line);
    if (line == "end_header") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (!magic_seen) {
      if (key != "mdct_chain") throw data_error(path + ": not a chain file");
      magic_seen = true;
      continue;
    }
    if (key == "family") {
      ls >> chain.family;
    } else if (key == "seed") {
      ls >> chain.seed;
    } else if (key == "dim") {
      ls >> chain.grid_spec.box.dim;
    } else if (key == "box") {
      ls >> chain.grid_spec.box.lo[0] >> chain.grid_spec.box.hi[0];
      if (chain.grid_spec.box.dim == 2) {
        ls >> chain.grid_spec.box.lo[1] >> chain.grid_spec.box.hi[1];
      }
    } else if (key == "R") {
      ls >> chain.grid_spec.R;
    } else if (key == "J1") {
      ls >> chain.grid_spec.J1[0];
      if (chain.grid_spec.box.dim == 2) ls >> chain.grid_spec.J1[1];
    } else if (key == "c") {
      ls >> chain.hyper.c;
    } else if (key == "a_sigma") {
      ls >> chain.hyper.a_sigma;
    } else if (key == "b_sigma") {
      ls >> chain.hyper.b_sigma;
    } else if (key == "h_eta") {
      ls >> chain.hyper.h_eta;
    } else if (key == "n_iter") {
      ls >> chain.n_iter;
    } else if (key == "burn_in") {
      ls >> chain.burn_in;
    } else if (key == "thin") {
      ls >> chain.thin;
    } else if (key == "p") {
      ls >> chain.p;
    } else if (key == "n_basis") {
      ls >> chain.n_basis;
    } else if (key == "n_delta") {
      ls >> chain.n_delta;
    } else if (key == "stored") {
      ls >> stored;
    } else {
      throw data_error(path + ": unknown header key: " + key);
    }
    if (ls.fail()) throw data_error(path + ": malformed header line: " + line);
  }
  if (!magic_seen || stored < 0) throw data_error(path + ": incomplete chain header");

  const std::size_t fields =
      static_cast<std::size_t>(chain.p + 1 + chain.n_basis + 1 + chain.n_delta + 1);
  std::vector<double> record(fields);
  for (long l = 0; l < stored; ++l) {
    in.read(reinterpret_cast<char*>(record.data()),
            static_cast<std::streamsize>(fields * sizeof(double)));
    if (!in) throw data_error(path + ": truncated chain records");
    const double* r = record.data();
    chain.gamma_draws.insert(chain.gamma_draws.end(), r, r + chain.p);
    r += chain.p;
    chain.sigma2_draws.push_back(*r++);
    chain.beta_draws.insert(chain.beta_draws.end(), r, r + chain.n_basis);
    r += chain.n_basis;
    chain.delta1_draws.push_back(*r++);
    chain.delta_draws.insert(chain.delta_draws.end(), r, r + chain.n_delta);
    r += chain.n_delta;
    chain.eta_draws.push_back(static_cast<int>(*r));
  }
  return chain;
}

}  // namespace mdct
