#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "approxmul/error.hpp"
#include "approxmul/logicsynth.hpp"

namespace approxmul {
namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

// Input i of a cube is b[i] for i < width_b, else a[i - width_b].
std::string input_name(unsigned i, unsigned width_b) {
  return i < width_b ? "b[" + std::to_string(i) + "]" : "a[" + std::to_string(i - width_b) + "]";
}

std::string cube_expr(const Cube& c, unsigned num_inputs, unsigned width_b) {
  std::string s;
  for (unsigned k = 0; k < num_inputs; ++k) {
    const unsigned i = num_inputs - 1 - k;
    const std::uint32_t bit = 1U << i;
    if (!(c.care & bit)) continue;
    if (!s.empty()) s += " & ";
    if (!(c.value & bit)) s += '~';
    s += input_name(i, width_b);
  }
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string emit_verilog(const std::string& name, std::span<const SopCover> covers,
                         const NetlistOptions& options) {
  if (!valid_identifier(name)) throw DomainError("emit_verilog: `" + name + "` is not a Verilog identifier");
  if (covers.empty()) throw DomainError("emit_verilog: no outputs");
  const unsigned n = options.width_a + options.width_b;
  for (const auto& c : covers)
    if (c.num_inputs != n)
      throw DomainError("emit_verilog: cover for o[" + std::to_string(c.output_index) + "] has " +
                        std::to_string(c.num_inputs) + " inputs, expected " + std::to_string(n));
  std::vector<const SopCover*> ordered;
  for (const auto& c : covers) ordered.push_back(&c);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const SopCover* x, const SopCover* y) { return x->output_index < y->output_index; });
  for (std::size_t i = 0; i < ordered.size(); ++i)
    if (ordered[i]->output_index != i) throw DomainError("emit_verilog: output indices must be 0..k-1");

  std::ostringstream os;
  for (const auto& line : options.comments) os << "// " << line << '\n';
  os << "module " << name << " (\n";
  os << "  input  wire [" << options.width_a - 1 << ":0] a,\n";
  os << "  input  wire [" << options.width_b - 1 << ":0] b,\n";
  os << "  output wire [" << ordered.size() - 1 << ":0] o\n";
  os << ");\n";
  for (const SopCover* c : ordered) {
    os << "  assign o[" << c->output_index << "] = ";
    if (c->is_constant_zero()) {
      os << "1'b0";
    } else if (c->is_constant_one()) {
      os << "1'b1";
    } else {
      std::vector<Cube> cubes = c->cubes;
      std::sort(cubes.begin(), cubes.end(), std::greater<>());
      for (std::size_t k = 0; k < cubes.size(); ++k) {
        if (k) os << " | ";
        const bool paren = cubes.size() > 1 && cubes[k].literal_count() > 1;
        if (paren) os << '(';
        os << cube_expr(cubes[k], n, options.width_b);
        if (paren) os << ')';
      }
    }
    os << ";\n";
  }
  os << "endmodule\n";
  return os.str();
}

ParsedNetlist parse_verilog(const std::string& text) {
  ParsedNetlist out;
  static const std::regex module_re(R"(^\s*module\s+([A-Za-z_][A-Za-z0-9_]*)\s*\()");
  static const std::regex port_re(R"(^\s*(input|output)\s+wire\s+\[(\d+):0\]\s+([abo])\s*,?\s*$)");
  static const std::regex assign_re(R"(^\s*assign\s+o\[(\d+)\]\s*=\s*(.*);\s*$)");
  static const std::regex literal_re(R"(^(~?)([ab])\[(\d+)\]$)");

  std::istringstream is(text);
  std::string line;
  unsigned out_width = 0;
  bool in_module = false, ended = false;
  std::vector<std::pair<unsigned, std::string>> assigns;
  while (std::getline(is, line)) {
    std::smatch m;
    const std::string t = trim(line);
    if (t.empty() || t.rfind("//", 0) == 0 || t == ");") continue;
    if (std::regex_search(line, m, module_re)) {
      out.name = m[1];
      in_module = true;
    } else if (std::regex_match(line, m, port_re)) {
      const unsigned w = static_cast<unsigned>(std::stoul(m[2])) + 1;
      const std::string port = m[3];
      if (port == "a") out.width_a = w;
      else if (port == "b") out.width_b = w;
      else out_width = w;
    } else if (std::regex_match(line, m, assign_re)) {
      assigns.emplace_back(static_cast<unsigned>(std::stoul(m[1])), m[2]);
    } else if (t == "endmodule") {
      ended = true;
    } else {
      throw FormatError("netlist: unrecognized line `" + t + "`");
    }
  }
  if (!in_module || !ended) throw FormatError("netlist: missing module/endmodule");
  if (!out.width_a || !out.width_b || !out_width) throw FormatError("netlist: missing port declarations");

  const unsigned n = out.width_a + out.width_b;
  out.covers.resize(out_width);
  std::vector<bool> seen(out_width, false);
  for (unsigned i = 0; i < out_width; ++i) out.covers[i] = SopCover{n, i, {}};
  for (const auto& [idx, expr] : assigns) {
    if (idx >= out_width || seen[idx]) throw FormatError("netlist: bad or duplicate assignment to o[" + std::to_string(idx) + "]");
    seen[idx] = true;
    SopCover& cov = out.covers[idx];
    const std::string e = trim(expr);
    if (e == "1'b0") continue;
    if (e == "1'b1") {
      cov.cubes.push_back(Cube{});
      continue;
    }
    std::istringstream terms(e);
    std::string term;
    while (std::getline(terms, term, '|')) {
      term = trim(term);
      if (term.size() >= 2 && term.front() == '(' && term.back() == ')') term = term.substr(1, term.size() - 2);
      Cube c;
      std::istringstream lits(term);
      std::string lit;
      while (std::getline(lits, lit, '&')) {
        lit = trim(lit);
        std::smatch lm;
        if (!std::regex_match(lit, lm, literal_re)) throw FormatError("netlist: bad literal `" + lit + "`");
        const unsigned bit = static_cast<unsigned>(std::stoul(lm[3]));
        const bool is_a = lm[2] == "a";
        if (bit >= (is_a ? out.width_a : out.width_b)) throw FormatError("netlist: literal out of range `" + lit + "`");
        const unsigned i = is_a ? out.width_b + bit : bit;
        c.care |= 1U << i;
        if (lm[1].length() == 0) c.value |= 1U << i;
      }
      cov.cubes.push_back(c);
    }
    std::sort(cov.cubes.begin(), cov.cubes.end());
  }
  for (unsigned i = 0; i < out_width; ++i)
    if (!seen[i]) throw FormatError("netlist: o[" + std::to_string(i) + "] never assigned");
  return out;
}

std::string write_pla(const PlaFile& pla) {
  const unsigned n = pla.width_a + pla.width_b;
  std::size_t cube_total = 0;
  for (const auto& c : pla.covers) {
    if (c.num_inputs != n) throw DomainError("write_pla: cover input count mismatch");
    cube_total += c.cubes.size();
  }
  std::ostringstream os;
  os << ".i " << n << '\n' << ".o " << pla.covers.size() << '\n' << ".ilb";
  for (unsigned k = 0; k < n; ++k) os << ' ' << input_name(n - 1 - k, pla.width_b);
  os << "\n.ob";
  for (const auto& c : pla.covers) os << " o[" << c.output_index << ']';
  os << "\n.p " << cube_total << '\n';
  for (std::size_t o = 0; o < pla.covers.size(); ++o) {
    std::string outs(pla.covers.size(), '0');
    outs[o] = '1';
    for (const auto& cube : pla.covers[o].cubes) os << format_cube(cube, n) << ' ' << outs << '\n';
  }
  os << ".e\n";
  return os.str();
}

PlaFile read_pla(const std::string& text) {
  PlaFile pla;
  std::istringstream is(text);
  std::string line;
  unsigned ni = 0, no = 0;
  std::size_t declared = 0, seen_cubes = 0;
  bool have_i = false, have_o = false, ended = false;
  std::vector<unsigned> out_index;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == ".i") {
      ls >> ni;
      have_i = true;
    } else if (head == ".o") {
      ls >> no;
      have_o = true;
      pla.covers.assign(no, SopCover{});
      out_index.assign(no, 0);
      for (unsigned k = 0; k < no; ++k) out_index[k] = k;
    } else if (head == ".ilb") {
      std::string name;
      unsigned count = 0;
      while (ls >> name) {
        ++count;
        if (name.rfind("a[", 0) == 0) ++pla.width_a;
        else if (name.rfind("b[", 0) == 0) ++pla.width_b;
        else throw FormatError("pla: unsupported input label `" + name + "`");
      }
      if (count != ni) throw FormatError("pla: .ilb count differs from .i");
    } else if (head == ".ob") {
      std::string name;
      unsigned k = 0;
      while (ls >> name) {
        if (k >= no || name.size() < 4 || name.rfind("o[", 0) != 0 || name.back() != ']')
          throw FormatError("pla: bad output label `" + name + "`");
        out_index[k++] = static_cast<unsigned>(std::stoul(name.substr(2, name.size() - 3)));
      }
    } else if (head == ".p") {
      ls >> declared;
    } else if (head == ".e" || head == ".end") {
      ended = true;
      break;
    } else if (head[0] == '.') {
      throw FormatError("pla: unsupported directive `" + head + "`");
    } else {
      if (!have_i || !have_o) throw FormatError("pla: cube before .i/.o");
      std::string outs;
      ls >> outs;
      if (head.size() != ni || outs.size() != no) throw FormatError("pla: cube width mismatch in `" + line + "`");
      const Cube c = parse_cube(head);
      for (unsigned k = 0; k < no; ++k) {
        if (outs[k] == '1') pla.covers[k].cubes.push_back(c);
        else if (outs[k] != '0' && outs[k] != '-' && outs[k] != '~')
          throw FormatError("pla: bad output value in `" + line + "`");
      }
      ++seen_cubes;
    }
  }
  if (!have_i || !have_o || !ended) throw FormatError("pla: missing .i/.o/.e");
  if (declared != seen_cubes) throw FormatError("pla: .p declares " + std::to_string(declared) + " cubes, found " + std::to_string(seen_cubes));
  if (pla.width_a + pla.width_b != ni) {
    pla.width_a = ni / 2;
    pla.width_b = ni - ni / 2;
  }
  for (unsigned k = 0; k < no; ++k) {
    pla.covers[k].num_inputs = ni;
    pla.covers[k].output_index = out_index[k];
  }
  return pla;
}

}  // namespace approxmul
