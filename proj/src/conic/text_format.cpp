#include <cstdio>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "irsnoma/conic.hpp"
#include "irsnoma/errors.hpp"

namespace irsnoma::conic {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_expr(std::ostream& os, const AffineExpr& e) {
  os << "{ " << num(e.constant);
  for (const auto& [j, a] : e.scalar_terms) os << " s " << j << ' ' << num(a);
  for (const auto& [j, c] : e.trace_terms) {
    os << " t " << j;
    for (Eigen::Index r = 0; r < c.rows(); ++r)
      for (Eigen::Index k = 0; k < c.cols(); ++k)
        os << ' ' << num(c(r, k).real()) << ' ' << num(c(r, k).imag());
  }
  os << " }";
}

const char* sense_name(Sense s) {
  switch (s) {
    case Sense::GreaterEqual: return "ge";
    case Sense::LessEqual: return "le";
    case Sense::Equal: return "eq";
  }
  return "?";
}

class Reader {
 public:
  Reader(std::istringstream& is, const ConeProgram& p, int line) : is_(is), p_(p), line_(line) {}

  std::string word() {
    std::string w;
    if (!(is_ >> w)) fail("unexpected end of line");
    return w;
  }
  std::string quoted() {
    std::string w;
    if (!(is_ >> std::quoted(w))) fail("expected a quoted string");
    return w;
  }
  double number() {
    const std::string w = word();
    try {
      std::size_t pos = 0;
      const double v = std::stod(w, &pos);
      if (pos != w.size()) fail("malformed number '" + w + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("malformed number '" + w + "'");
    }
  }
  int integer() {
    const double v = number();
    if (v != static_cast<int>(v)) fail("expected an integer");
    return static_cast<int>(v);
  }
  std::optional<double> bound() {
    const std::string w = word();
    if (w == "-") return std::nullopt;
    try {
      return std::stod(w);
    } catch (const std::logic_error&) {
      fail("malformed bound '" + w + "'");
    }
  }

  AffineExpr expr() {
    if (word() != "{") fail("expected '{'");
    AffineExpr e;
    e.constant = number();
    for (;;) {
      const std::string tag = word();
      if (tag == "}") return e;
      if (tag == "s") {
        const int j = integer();
        e.scalar_terms.emplace_back(j, number());
      } else if (tag == "t") {
        const int j = integer();
        if (j < 0 || j >= static_cast<int>(p_.matrix_vars.size()))
          fail("trace term references undeclared matrix " + std::to_string(j));
        const int n = p_.matrix_vars[static_cast<std::size_t>(j)].size;
        Eigen::MatrixXcd c(n, n);
        for (int r = 0; r < n; ++r)
          for (int k = 0; k < n; ++k) {
            const double re = number();
            c(r, k) = {re, number()};
          }
        e.trace_terms.emplace_back(j, std::move(c));
      } else {
        fail("unknown expression tag '" + tag + "'");
      }
    }
  }

  void done() {
    std::string rest;
    if (is_ >> rest) fail("trailing input '" + rest + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ModelingError("cone program text, line " + std::to_string(line_) + ": " + what);
  }

 private:
  std::istringstream& is_;
  const ConeProgram& p_;
  int line_;
};

}  // namespace

void write_text(std::ostream& os, const ConeProgram& p) {
  os << "cone_program 1\n";
  for (const auto& m : p.matrix_vars)
    os << "matrix " << std::quoted(m.name) << ' ' << m.size << ' '
       << (m.complex ? "complex" : "real") << '\n';
  for (const auto& s : p.scalar_vars)
    os << "scalar " << std::quoted(s.name) << ' ' << (s.lower ? num(*s.lower) : "-") << ' '
       << (s.upper ? num(*s.upper) : "-") << '\n';
  os << "objective ";
  write_expr(os, p.objective);
  os << '\n';
  for (const auto& c : p.lin_cons) {
    os << "linear " << std::quoted(c.label) << ' ' << sense_name(c.sense) << ' ';
    write_expr(os, c.expr);
    os << '\n';
  }
  for (const auto& q : p.quad_cons) {
    os << "quadratic " << std::quoted(q.label) << ' ' << q.terms.size() << " weights";
    if (q.weights.empty())
      os << " none";
    else
      for (double w : q.weights) os << ' ' << num(w);
    os << " bound ";
    write_expr(os, q.bound);
    os << " denominator ";
    if (q.denominator)
      write_expr(os, *q.denominator);
    else
      os << "none";
    os << " terms";
    for (const auto& t : q.terms) {
      os << ' ';
      write_expr(os, t);
    }
    os << '\n';
  }
  for (const auto& l : p.psd_cons) {
    os << "lmi " << std::quoted(l.label) << ' ' << l.size;
    for (const auto& e : l.entries) {
      os << ' ';
      write_expr(os, e);
    }
    os << '\n';
  }
  for (const auto& d : p.diag_cons)
    os << "diagonal " << std::quoted(d.label) << ' ' << d.var << ' ' << d.index << ' '
       << num(d.value) << '\n';
  os << "end\n";
}

std::string to_text(const ConeProgram& p) {
  std::ostringstream os;
  write_text(os, p);
  return os.str();
}

ConeProgram read_text(std::istream& is) {
  ConeProgram p;
  std::string line;
  int lineno = 0;
  bool header = false, ended = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Reader rd(ls, p, lineno);
    const std::string kind = rd.word();
    if (!header) {
      if (kind != "cone_program" || rd.integer() != 1) rd.fail("expected 'cone_program 1'");
      header = true;
      rd.done();
      continue;
    }
    if (ended) rd.fail("content after 'end'");
    if (kind == "matrix") {
      std::string name = rd.quoted();
      const int size = rd.integer();
      const std::string field = rd.word();
      if (field != "complex" && field != "real") rd.fail("expected 'complex' or 'real'");
      p.add_matrix(std::move(name), size, field == "complex");
    } else if (kind == "scalar") {
      std::string name = rd.quoted();
      const auto lo = rd.bound();
      const auto hi = rd.bound();
      p.add_scalar(std::move(name), lo, hi);
    } else if (kind == "objective") {
      p.objective = rd.expr();
    } else if (kind == "linear") {
      std::string label = rd.quoted();
      const std::string s = rd.word();
      Sense sense;
      if (s == "ge")
        sense = Sense::GreaterEqual;
      else if (s == "le")
        sense = Sense::LessEqual;
      else if (s == "eq")
        sense = Sense::Equal;
      else
        rd.fail("unknown sense '" + s + "'");
      p.add_linear(rd.expr(), sense, std::move(label));
    } else if (kind == "quadratic") {
      QuadraticConstraint q;
      q.label = rd.quoted();
      const int n = rd.integer();
      if (rd.word() != "weights") rd.fail("expected 'weights'");
      std::streampos mark = ls.tellg();
      if (rd.word() != "none") {
        ls.seekg(mark);
        for (int j = 0; j < n; ++j) q.weights.push_back(rd.number());
      }
      if (rd.word() != "bound") rd.fail("expected 'bound'");
      q.bound = rd.expr();
      if (rd.word() != "denominator") rd.fail("expected 'denominator'");
      mark = ls.tellg();
      if (rd.word() != "none") {
        ls.seekg(mark);
        q.denominator = rd.expr();
      }
      if (rd.word() != "terms") rd.fail("expected 'terms'");
      for (int j = 0; j < n; ++j) q.terms.push_back(rd.expr());
      p.add_quadratic(std::move(q));
    } else if (kind == "lmi") {
      LmiConstraint l;
      l.label = rd.quoted();
      l.size = rd.integer();
      if (l.size < 1) rd.fail("LMI size must be >= 1");
      for (int j = 0; j < l.size * (l.size + 1) / 2; ++j) l.entries.push_back(rd.expr());
      p.add_lmi(std::move(l));
    } else if (kind == "diagonal") {
      std::string label = rd.quoted();
      const int var = rd.integer();
      const int index = rd.integer();
      p.add_diagonal(var, index, rd.number(), std::move(label));
    } else if (kind == "end") {
      ended = true;
    } else {
      rd.fail("unknown record '" + kind + "'");
    }
    rd.done();
  }
  if (!header) throw ModelingError("cone program text: missing header");
  if (!ended) throw ModelingError("cone program text: missing 'end'");
  p.validate();
  return p;
}

}  // namespace irsnoma::conic
