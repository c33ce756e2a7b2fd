#include "nsw/io.hpp"

#include "nsw/errors.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace nsw {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> words;
};

std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> out;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
    std::istringstream words(text);
    Line line{number, {}};
    for (std::string w; words >> w;) line.words.push_back(w);
    if (!line.words.empty()) out.push_back(std::move(line));
  }
  return out;
}

[[noreturn]] void fail(const Line& line, const std::string& what) {
  throw ParseError("line " + std::to_string(line.number) + ": " + what);
}

void expect_words(const Line& line, std::size_t count) {
  if (line.words.size() != count) {
    fail(line, "expected " + std::to_string(count) + " fields for '" + line.words[0] + "'");
  }
}

std::size_t parse_count(const Line& line, const std::string& word) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(word, &used);
    if (used != word.size() || v < 0) fail(line, "bad count '" + word + "'");
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    fail(line, "bad count '" + word + "'");
  }
}

std::size_t parse_index(const Line& line, const std::string& word, std::size_t limit) {
  std::size_t v = parse_count(line, word);
  if (v < 1 || v > limit) fail(line, "index " + word + " out of range 1.." + std::to_string(limit));
  return v - 1;
}

Rational parse_number(const Line& line, const std::string& word) {
  try {
    return parse_rational(word);
  } catch (const std::invalid_argument& e) {
    fail(line, e.what());
  }
}

Integer parse_nonneg_integer(const Line& line, const std::string& word) {
  Rational r = parse_number(line, word);
  if (denominator_of(r) != 1) fail(line, "expected an integer, got '" + word + "'");
  if (r < 0) fail(line, "expected a non-negative value, got '" + word + "'");
  return numerator_of(r);
}

template <class T>
void set_once(const Line& line, std::vector<bool>& seen, std::size_t index, T& slot, T value) {
  if (seen[index]) fail(line, "duplicate '" + line.words[0] + "' entry");
  seen[index] = true;
  slot = std::move(value);
}

void require_all(const std::vector<bool>& seen, const std::string& what) {
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k]) throw ParseError("missing '" + what + " " + std::to_string(k + 1) + "'");
  }
}

std::pair<std::size_t, std::size_t> parse_header(const Line& line) {
  expect_words(line, 3);
  return {parse_count(line, line.words[1]), parse_count(line, line.words[2])};
}

NswInstance parse_nsw(const std::vector<Line>& lines) {
  auto [n, m] = parse_header(lines[0]);
  NswInstance inst{Matrix<Integer>(n, m), std::vector<Integer>(n)};
  std::vector<bool> seen_cap(n, false);
  Matrix<char> seen_val(n, m, 0);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& line = lines[k];
    const std::string& key = line.words[0];
    if (key == "cap") {
      expect_words(line, 3);
      std::size_t i = parse_index(line, line.words[1], n);
      set_once(line, seen_cap, i, inst.cap[i], parse_nonneg_integer(line, line.words[2]));
    } else if (key == "val") {
      expect_words(line, 4);
      std::size_t i = parse_index(line, line.words[1], n);
      std::size_t j = parse_index(line, line.words[2], m);
      if (seen_val(i, j)) fail(line, "duplicate 'val' entry");
      seen_val(i, j) = true;
      inst.value(i, j) = parse_nonneg_integer(line, line.words[3]);
    } else {
      fail(line, "unknown record '" + key + "' in nsw instance");
    }
  }
  require_all(seen_cap, "cap");
  try {
    inst.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return inst;
}

MarketInstance parse_market(const std::vector<Line>& lines) {
  auto [n, m] = parse_header(lines[0]);
  MarketInstance market{std::vector<Integer>(n), std::vector<Integer>(n), std::vector<Integer>(m),
                        Matrix<Integer>(n, m)};
  std::vector<bool> seen_budget(n, false);
  std::vector<bool> seen_ucap(n, false);
  std::vector<bool> seen_ecap(m, false);
  Matrix<char> seen_util(n, m, 0);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& line = lines[k];
    const std::string& key = line.words[0];
    if (key == "budget" || key == "ucap") {
      expect_words(line, 3);
      std::size_t i = parse_index(line, line.words[1], n);
      Integer v = parse_nonneg_integer(line, line.words[2]);
      if (key == "budget") {
        set_once(line, seen_budget, i, market.budget[i], v);
      } else {
        set_once(line, seen_ucap, i, market.utility_cap[i], v);
      }
    } else if (key == "ecap") {
      expect_words(line, 3);
      std::size_t j = parse_index(line, line.words[1], m);
      set_once(line, seen_ecap, j, market.earning_cap[j], parse_nonneg_integer(line, line.words[2]));
    } else if (key == "util") {
      expect_words(line, 4);
      std::size_t i = parse_index(line, line.words[1], n);
      std::size_t j = parse_index(line, line.words[2], m);
      if (seen_util(i, j)) fail(line, "duplicate 'util' entry");
      seen_util(i, j) = true;
      market.utility(i, j) = parse_nonneg_integer(line, line.words[3]);
    } else {
      fail(line, "unknown record '" + key + "' in market instance");
    }
  }
  require_all(seen_budget, "budget");
  require_all(seen_ucap, "ucap");
  require_all(seen_ecap, "ecap");
  try {
    market.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return market;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

}  // namespace

InstanceFile parse_instance(std::istream& in) {
  auto lines = tokenize(in);
  if (lines.empty()) throw ParseError("empty instance file");
  const std::string& kind = lines[0].words[0];
  if (kind == "nsw") return parse_nsw(lines);
  if (kind == "market") return parse_market(lines);
  fail(lines[0], "expected 'nsw' or 'market' header, got '" + kind + "'");
}

InstanceFile read_instance_file(const std::string& path) {
  auto in = open(path);
  return parse_instance(in);
}

void write_instance(std::ostream& out, const NswInstance& inst) {
  out << "nsw " << inst.agents() << ' ' << inst.items() << '\n';
  for (std::size_t i = 0; i < inst.agents(); ++i) out << "cap " << i + 1 << ' ' << inst.cap[i] << '\n';
  for (std::size_t i = 0; i < inst.agents(); ++i)
    for (std::size_t j = 0; j < inst.items(); ++j)
      if (inst.value(i, j) != 0) out << "val " << i + 1 << ' ' << j + 1 << ' ' << inst.value(i, j) << '\n';
}

void write_instance(std::ostream& out, const MarketInstance& market) {
  out << "market " << market.buyers() << ' ' << market.goods() << '\n';
  for (std::size_t i = 0; i < market.buyers(); ++i) out << "budget " << i + 1 << ' ' << market.budget[i] << '\n';
  for (std::size_t i = 0; i < market.buyers(); ++i) out << "ucap " << i + 1 << ' ' << market.utility_cap[i] << '\n';
  for (std::size_t j = 0; j < market.goods(); ++j) out << "ecap " << j + 1 << ' ' << market.earning_cap[j] << '\n';
  for (std::size_t i = 0; i < market.buyers(); ++i)
    for (std::size_t j = 0; j < market.goods(); ++j)
      if (market.utility(i, j) != 0) out << "util " << i + 1 << ' ' << j + 1 << ' ' << market.utility(i, j) << '\n';
}

// State files always spell rationals as num/den so the format is uniform.
namespace {
std::string frac(const Rational& r) {
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}
}  // namespace

void write_state(std::ostream& out, const StateFile& state) {
  const LinearMarket& mk = state.market;
  out << "state " << mk.buyers() << ' ' << mk.goods() << '\n';
  if (state.epsilon) {
    out << "epsilon " << frac(*state.epsilon) << '\n';
  } else {
    out << "exact\n";
  }
  for (std::size_t i = 0; i < mk.buyers(); ++i) out << "budget " << i + 1 << ' ' << frac(mk.budget[i]) << '\n';
  for (std::size_t i = 0; i < mk.buyers(); ++i) out << "ucap " << i + 1 << ' ' << frac(mk.utility_cap[i]) << '\n';
  for (std::size_t j = 0; j < mk.goods(); ++j) out << "ecap " << j + 1 << ' ' << frac(mk.earning_cap[j]) << '\n';
  for (std::size_t i = 0; i < mk.buyers(); ++i)
    for (std::size_t j = 0; j < mk.goods(); ++j)
      if (mk.utility(i, j) != 0) out << "util " << i + 1 << ' ' << j + 1 << ' ' << frac(mk.utility(i, j)) << '\n';
  for (std::size_t j = 0; j < state.price.size(); ++j) out << "price " << j + 1 << ' ' << frac(state.price[j]) << '\n';
  for (std::size_t i = 0; i < state.flow.rows(); ++i)
    for (std::size_t j = 0; j < state.flow.cols(); ++j)
      if (state.flow(i, j) != 0) out << "flow " << i + 1 << ' ' << j + 1 << ' ' << frac(state.flow(i, j)) << '\n';
  for (std::size_t i = 0; i < state.allocation.buyers(); ++i)
    for (std::size_t j = 0; j < state.allocation.goods(); ++j)
      if (state.allocation.share(i, j) != 0)
        out << "alloc " << i + 1 << ' ' << j + 1 << ' ' << frac(state.allocation.share(i, j)) << '\n';
}

StateFile parse_state(std::istream& in) {
  auto lines = tokenize(in);
  if (lines.empty()) throw ParseError("empty state file");
  if (lines[0].words[0] != "state") fail(lines[0], "expected 'state' header");
  auto [n, m] = parse_header(lines[0]);
  StateFile st;
  st.market.budget.assign(n, 0);
  st.market.utility_cap.assign(n, 0);
  st.market.earning_cap.assign(m, 0);
  st.market.utility = Matrix<Rational>(n, m);
  st.price.assign(m, 0);
  st.flow = Matrix<Rational>(n, m);
  st.allocation.share = Matrix<Rational>(n, m);
  std::vector<bool> seen_budget(n, false), seen_ucap(n, false), seen_ecap(m, false), seen_price(m, false);
  bool seen_mode = false;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& line = lines[k];
    const std::string& key = line.words[0];
    if (key == "epsilon" || key == "exact") {
      if (seen_mode) fail(line, "duplicate epsilon record");
      seen_mode = true;
      if (key == "epsilon") {
        expect_words(line, 2);
        st.epsilon = parse_number(line, line.words[1]);
      } else {
        expect_words(line, 1);
      }
    } else if (key == "budget" || key == "ucap") {
      expect_words(line, 3);
      std::size_t i = parse_index(line, line.words[1], n);
      if (key == "budget") {
        set_once(line, seen_budget, i, st.market.budget[i], parse_number(line, line.words[2]));
      } else {
        set_once(line, seen_ucap, i, st.market.utility_cap[i], parse_number(line, line.words[2]));
      }
    } else if (key == "ecap" || key == "price") {
      expect_words(line, 3);
      std::size_t j = parse_index(line, line.words[1], m);
      if (key == "ecap") {
        set_once(line, seen_ecap, j, st.market.earning_cap[j], parse_number(line, line.words[2]));
      } else {
        set_once(line, seen_price, j, st.price[j], parse_number(line, line.words[2]));
      }
    } else if (key == "util" || key == "flow" || key == "alloc") {
      expect_words(line, 4);
      std::size_t i = parse_index(line, line.words[1], n);
      std::size_t j = parse_index(line, line.words[2], m);
      Rational v = parse_number(line, line.words[3]);
      if (key == "util") st.market.utility(i, j) = v;
      else if (key == "flow") st.flow(i, j) = v;
      else st.allocation.share(i, j) = v;
    } else {
      fail(line, "unknown record '" + key + "' in state file");
    }
  }
  if (!seen_mode) throw ParseError("missing 'epsilon' or 'exact' record");
  require_all(seen_budget, "budget");
  require_all(seen_ucap, "ucap");
  require_all(seen_ecap, "ecap");
  require_all(seen_price, "price");
  bool integral = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const Rational& s = st.allocation.share(i, j);
      if (s != 0 && s != 1) integral = false;
    }
  st.allocation.integral = integral;
  return st;
}

StateFile read_state_file(const std::string& path) {
  auto in = open(path);
  return parse_state(in);
}

}  // namespace nsw
