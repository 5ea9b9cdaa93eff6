#include "gammaproc/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string_view>

#include "gammaproc/error.hpp"

namespace gammaproc {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_comments(std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::string shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string ten_digits(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

template <class Range>
std::string join(const Range& values) {
  std::string out;
  bool first = true;
  for (double x : values) {
    if (!first) out += ' ';
    out += shortest(x);
    first = false;
  }
  return out;
}

}  // namespace

Corpus parse_uci_bow(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t header[3];
  int header_seen = 0;
  std::vector<CorpusEntry> entries;
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  std::uint64_t n_docs = 0, vocab = 0, nnz = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (header_seen < 3) {
      if (!parse_number(body, header[header_seen])) {
        static const char* names[] = {"document count D", "vocabulary size W", "nonzero count NNZ"};
        throw ParseError(std::string("malformed header: expected ") + names[header_seen], line_no);
      }
      if (++header_seen == 3) {
        n_docs = header[0];
        vocab = header[1];
        nnz = header[2];
        if (n_docs == 0 || vocab == 0) throw ParseError("header dimensions must be positive", line_no);
      }
      continue;
    }
    std::istringstream fields{std::string(body)};
    std::string tok[3], extra;
    if (!(fields >> tok[0] >> tok[1] >> tok[2]) || (fields >> extra)) {
      throw ParseError("expected 'docID wordID count'", line_no);
    }
    std::uint64_t doc = 0, word = 0;
    std::int64_t count = 0;
    if (!parse_number(tok[0], doc) || !parse_number(tok[1], word) || !parse_number(tok[2], count)) {
      throw ParseError("non-integer field", line_no);
    }
    if (doc < 1 || doc > n_docs) throw ParseError("document id " + tok[0] + " out of range", line_no);
    if (word < 1 || word > vocab) throw ParseError("word id " + tok[1] + " out of range", line_no);
    if (count <= 0) throw ParseError("count must be positive", line_no);
    if (!seen.emplace(doc, word).second) {
      throw ParseError("duplicate entry for document " + tok[0] + ", word " + tok[1], line_no);
    }
    entries.push_back({static_cast<std::uint32_t>(word - 1), static_cast<std::uint32_t>(doc - 1),
                       static_cast<std::uint64_t>(count)});
  }
  if (header_seen < 3) throw ParseError("malformed header: file ends before D, W and NNZ", line_no);
  if (entries.size() != nnz) {
    throw ParseError("NNZ mismatch: header declares " + std::to_string(nnz) + " entries, found " +
                         std::to_string(entries.size()),
                     line_no);
  }
  return Corpus(vocab, n_docs, std::move(entries));
}

Corpus parse_uci_bow(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_uci_bow(in);
}

void write_uci_bow(std::ostream& out, const Corpus& corpus, const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << corpus.n_docs() << '\n' << corpus.vocab_size() << '\n' << corpus.nnz() << '\n';
  for (const CorpusEntry& e : corpus.entries()) out << e.doc + 1 << ' ' << e.word + 1 << ' ' << e.count << '\n';
}

void write_uci_bow(const std::filesystem::path& path, const Corpus& corpus, const std::vector<std::string>& comments) {
  auto out = open_out(path);
  write_uci_bow(out, corpus, comments);
  finish(out, path);
}

void write_trace(std::ostream& out, const FitTrace& trace, const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "iteration,elapsed_seconds,elbo,heldout_loglik\n";
  for (const auto& row : trace.rows) {
    out << row.iteration << ',' << ten_digits(row.elapsed_seconds) << ',' << (row.elbo ? ten_digits(*row.elbo) : "")
        << ',' << ten_digits(row.heldout) << '\n';
  }
}

void write_trace(const std::filesystem::path& path, const FitTrace& trace, const std::vector<std::string>& comments) {
  auto out = open_out(path);
  write_trace(out, trace, comments);
  finish(out, path);
}

FitTrace read_trace(std::istream& in) {
  FitTrace trace;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!header) {
      if (body != "iteration,elapsed_seconds,elbo,heldout_loglik") throw ParseError("unexpected trace header", line_no);
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream fields{std::string(body)};
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (body.back() == ',') cells.emplace_back();
    if (cells.size() != 4) throw ParseError("expected four trace columns", line_no);
    FitTrace::Row row;
    if (!parse_number(cells[0], row.iteration) || !parse_number(cells[1], row.elapsed_seconds) ||
        !parse_number(cells[3], row.heldout)) {
      throw ParseError("malformed trace row", line_no);
    }
    if (!trim(cells[2]).empty()) {
      double e = 0.0;
      if (!parse_number(cells[2], e)) throw ParseError("malformed elbo value", line_no);
      row.elbo = e;
    }
    trace.rows.push_back(row);
  }
  if (!header) throw ParseError("missing trace header", line_no);
  return trace;
}

namespace {

void write_model(std::ostream& out, const char* kind, const FactorLoadings& phi, const FactorCounts& z) {
  out << "[model]\nkind=" << kind << "\nvocab_size=" << phi.vocab_size() << "\nn_docs=" << z.n_docs()
      << "\nn_atoms=" << phi.n_factors() << "\n\n[loadings]\nvalues=" << join(phi.values())
      << "\n\n[counts]\nvalues=" << join(z.values()) << "\n";
}

using Sections = std::map<std::string, std::map<std::string, std::string>>;

Sections read_sections(std::istream& in) {
  Sections sections;
  std::string current, line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError("malformed section header", line_no);
      current = std::string(body.substr(1, body.size() - 2));
      sections[current];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos || current.empty()) throw ParseError("expected key=value inside a section", line_no);
    sections[current][std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
  }
  return sections;
}

const std::string& field(const Sections& s, const std::string& section, const std::string& key) {
  const auto sec = s.find(section);
  if (sec == s.end()) throw ParseError("state dump lacks section [" + section + "]");
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) throw ParseError("state dump lacks " + section + "." + key);
  return it->second;
}

std::vector<double> numbers(const Sections& s, const std::string& section, const std::string& key,
                            std::size_t expected) {
  std::vector<double> out;
  std::istringstream fields(field(s, section, key));
  std::string tok;
  while (fields >> tok) {
    double x = 0.0;
    if (!parse_number(tok, x)) throw ParseError("non-numeric value in " + section + "." + key);
    out.push_back(x);
  }
  if (out.size() != expected) {
    throw ParseError(section + "." + key + " holds " + std::to_string(out.size()) + " values, expected " +
                     std::to_string(expected));
  }
  return out;
}

double number(const Sections& s, const std::string& section, const std::string& key) {
  return numbers(s, section, key, 1)[0];
}

std::size_t size_field(const Sections& s, const std::string& key) {
  std::size_t n = 0;
  if (!parse_number(field(s, "model", key), n)) throw ParseError("model." + key + " must be a nonnegative integer");
  return n;
}

}  // namespace

void write_state(std::ostream& out, const VariationalState& s, const std::vector<std::string>& comments) {
  write_comments(out, comments);
  write_model(out, "vi", s.expected_loadings(), s.expected_counts());
  out << "\n[vi]\nmax_rounds=" << s.max_rounds << "\nxi=" << join(s.xi) << "\neps=" << join(s.eps)
      << "\nu=" << join(s.u) << "\nv=" << join(s.v) << "\nvarphi=" << join(s.varphi) << "\nkappa1="
      << shortest(s.kappa1) << "\nkappa2=" << shortest(s.kappa2) << "\ntau1=" << shortest(s.tau1)
      << "\ntau2=" << shortest(s.tau2) << "\nrho1=" << shortest(s.rho1) << "\nrho2=" << shortest(s.rho2)
      << "\nlambda=" << join(s.lambda) << "\nb=" << join(s.b) << "\n";
}

void write_state(std::ostream& out, const ChainState& s, const std::vector<std::string>& comments) {
  write_comments(out, comments);
  write_model(out, "chain", s.loadings, s.z);
  std::vector<double> rounds(s.rounds.begin(), s.rounds.end());
  out << "\n[chain]\nrounds=" << join(rounds) << "\nalpha=" << shortest(s.alpha) << "\nc=" << shortest(s.c)
      << "\ngamma_mass=" << shortest(s.gamma_mass) << "\n";
}

void write_state(std::ostream& out, const GroundTruth& truth, const std::vector<std::string>& comments) {
  write_comments(out, comments);
  write_model(out, "truth", truth.loadings, truth.counts);
  std::vector<double> rounds, weights;
  for (const auto& a : truth.draw.atoms) {
    rounds.push_back(a.round);
    weights.push_back(a.weight);
  }
  out << "\n[truth]\nalpha=" << shortest(truth.draw.params.alpha) << "\nc=" << shortest(truth.draw.params.c)
      << "\nmass=" << shortest(truth.draw.params.mass) << "\nrounds=" << truth.draw.rounds
      << "\natom_rounds=" << join(rounds) << "\natom_weights=" << join(weights) << "\n";
}

LoadedState read_state(std::istream& in) {
  const Sections s = read_sections(in);
  LoadedState st;
  st.kind = field(s, "model", "kind");
  const std::size_t V = size_field(s, "vocab_size"), N = size_field(s, "n_docs"), K = size_field(s, "n_atoms");
  try {
    st.loadings = FactorLoadings(V, K, numbers(s, "loadings", "values", V * K));
    st.counts = FactorCounts(K, N, numbers(s, "counts", "values", K * N));
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid state dump: ") + e.what());
  }

  if (st.kind == "vi") {
    VariationalState v;
    v.n_atoms = K;
    v.n_docs = N;
    v.vocab_size = V;
    const double R = number(s, "vi", "max_rounds");
    if (!(R >= 1) || R != std::floor(R)) throw ParseError("vi.max_rounds must be a positive integer");
    v.max_rounds = static_cast<int>(R);
    v.xi = numbers(s, "vi", "xi", K);
    v.eps = numbers(s, "vi", "eps", K);
    v.u = numbers(s, "vi", "u", K);
    v.v = numbers(s, "vi", "v", K);
    v.varphi = numbers(s, "vi", "varphi", K * v.max_rounds);
    v.kappa1 = number(s, "vi", "kappa1");
    v.kappa2 = number(s, "vi", "kappa2");
    v.tau1 = number(s, "vi", "tau1");
    v.tau2 = number(s, "vi", "tau2");
    v.rho1 = number(s, "vi", "rho1");
    v.rho2 = number(s, "vi", "rho2");
    v.lambda = numbers(s, "vi", "lambda", K * N);
    v.b = numbers(s, "vi", "b", V * K);
    try {
      v.validate();
    } catch (const DomainError& e) {
      throw ParseError(std::string("invalid variational state: ") + e.what());
    }
    st.vi = std::move(v);
  } else if (st.kind == "chain") {
    ChainState c;
    c.loadings = st.loadings;
    c.z = st.counts;
    for (double r : numbers(s, "chain", "rounds", K)) c.rounds.push_back(static_cast<int>(r));
    c.alpha = number(s, "chain", "alpha");
    c.c = number(s, "chain", "c");
    c.gamma_mass = number(s, "chain", "gamma_mass");
    try {
      c.validate();
    } catch (const DomainError& e) {
      throw ParseError(std::string("invalid chain state: ") + e.what());
    }
    st.chain = std::move(c);
  } else if (st.kind != "truth") {
    throw ParseError("unknown state kind '" + st.kind + "'");
  }
  return st;
}

LoadedState read_state(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_state(in);
}

}  // namespace gammaproc
