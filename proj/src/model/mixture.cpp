#include "spininterp/model/mixture.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spininterp/errors.hpp"

namespace spininterp {

std::string_view to_string(Domain domain) {
  return domain == Domain::hypercube ? "hypercube" : "sphere";
}

Domain domain_from_string(std::string_view text) {
  if (text == "hypercube") return Domain::hypercube;
  if (text == "sphere") return Domain::sphere;
  throw PreconditionError("unknown domain '" + std::string(text) + "'");
}

MixtureSpec::MixtureSpec(std::vector<double> gammas, Domain domain)
    : gammas_(std::move(gammas)), domain_(domain) {
  if (gammas_.empty()) throw PreconditionError("mixture needs at least gamma_2");
  bool any_positive = false;
  for (double g : gammas_) {
    if (!std::isfinite(g) || g < 0.0) throw PreconditionError("mixture coefficients must be finite and >= 0");
    any_positive = any_positive || g > 0.0;
  }
  if (!any_positive) throw PreconditionError("mixture needs some gamma_p > 0");
  while (gammas_.size() > 1 && gammas_.back() == 0.0) gammas_.pop_back();
}

MixtureSpec MixtureSpec::sherrington_kirkpatrick(Domain domain) {
  return MixtureSpec({std::sqrt(0.5)}, domain);
}

MixtureSpec MixtureSpec::pure(int p, Domain domain) {
  if (p < 2) throw PreconditionError("pure model needs p >= 2");
  std::vector<double> g(static_cast<std::size_t>(p - 1), 0.0);
  g.back() = 1.0;
  return MixtureSpec(std::move(g), domain);
}

double MixtureSpec::gamma(int p) const {
  if (p < 2 || p > p_max()) return 0.0;
  return gammas_[static_cast<std::size_t>(p - 2)];
}

std::vector<int> MixtureSpec::active_orders() const {
  std::vector<int> out;
  for (int p = 2; p <= p_max(); ++p)
    if (gamma(p) > 0.0) out.push_back(p);
  return out;
}

double MixtureSpec::xi(double s) const {
  double acc = 0.0;
  for (int p = p_max(); p >= 2; --p) acc = (acc + gamma(p) * gamma(p)) * s;
  return acc * s;
}

double MixtureSpec::xi_prime(double s) const {
  double acc = 0.0;
  for (int p = 2; p <= p_max(); ++p) acc += gamma(p) * gamma(p) * p * std::pow(s, p - 1);
  return acc;
}

double MixtureSpec::xi_second(double s) const {
  double acc = 0.0;
  for (int p = 2; p <= p_max(); ++p) acc += gamma(p) * gamma(p) * p * (p - 1) * std::pow(s, p - 2);
  return acc;
}

double MixtureSpec::xi_second_abs(double r) const {
  return xi_second(std::fabs(r));
}

std::string MixtureSpec::to_config() const {
  std::ostringstream os;
  os << "gammas = [";
  for (std::size_t i = 0; i < gammas_.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", gammas_[i]);
    os << (i ? ", " : "") << buf;
  }
  os << "]\ndomain = \"" << to_string(domain_) << "\"\n";
  return os.str();
}

std::uint64_t MixtureSpec::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_config()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_list(std::string_view value, int line_no) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']')
    throw PreconditionError("line " + std::to_string(line_no) + ": gammas must be a [..] list");
  std::vector<double> out;
  std::string body(value.substr(1, value.size() - 2));
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = trim(item);
    if (t.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(std::string(t), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size())
      throw PreconditionError("line " + std::to_string(line_no) + ": bad number '" + std::string(t) + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

MixtureSpec parse_mixture(std::string_view text) {
  std::vector<double> gammas;
  bool have_gammas = false;
  Domain domain = Domain::hypercube;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw PreconditionError("line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key == "gammas") {
      gammas = parse_list(value, line_no);
      have_gammas = true;
    } else if (key == "domain") {
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      domain = domain_from_string(value);
    } else {
      throw PreconditionError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_gammas) throw PreconditionError("config is missing 'gammas'");
  return MixtureSpec(std::move(gammas), domain);
}

MixtureSpec load_mixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open spec file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_mixture(buf.str());
}

}  // namespace spininterp
