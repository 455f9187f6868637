#include "cstar/json_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cstar {

namespace {

std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // collapse negative zero
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void dump_rec(const Json& value, std::string& out) {
  switch (value.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dump_rec(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : value) {
        if (!first) out += ',';
        first = false;
        dump_rec(item, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += format_double(value.get<double>());
      break;
    default:
      out += value.dump();
      break;
  }
}

double require_finite(double x, const char* what) {
  if (!std::isfinite(x))
    raise(ErrorCode::ParseError, std::string(what) + ": non-finite value");
  return x;
}

const Json& require_field(const Json& value, const char* key) {
  if (!value.is_object() || !value.contains(key))
    raise(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  return value.at(key);
}

Index require_count(const Json& value, const char* what) {
  if (!value.is_number_integer() || value.get<long long>() < 0)
    raise(ErrorCode::ParseError, std::string(what) + ": expected a nonnegative integer");
  return static_cast<Index>(value.get<long long>());
}

}  // namespace

std::string canonical_dump(const Json& value) {
  std::string out;
  dump_rec(value, out);
  return out;
}

Json matrix_to_json(const CMatrix& a) {
  Json data = Json::array();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      data.push_back(Json::array({a(i, j).real(), a(i, j).imag()}));
  return Json{{"rows", a.rows()}, {"cols", a.cols()}, {"data", std::move(data)}};
}

CMatrix matrix_from_json(const Json& value) {
  Index rows = require_count(require_field(value, "rows"), "rows");
  Index cols = require_count(require_field(value, "cols"), "cols");
  const Json& data = require_field(value, "data");
  if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols)
    raise(ErrorCode::ParseError, "matrix data length does not match rows * cols");
  CMatrix out(rows, cols);
  Index idx = 0;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j, ++idx) {
      const Json& entry = data.at(static_cast<size_t>(idx));
      if (!entry.is_array() || entry.size() != 2)
        raise(ErrorCode::ParseError, "matrix entry must be an [re, im] pair");
      out(i, j) = Complex(require_finite(entry.at(0).get<double>(), "matrix entry"),
                          require_finite(entry.at(1).get<double>(), "matrix entry"));
    }
  return out;
}

Json ucp_to_json(const UcpMap& map) {
  Json blocks = Json::array();
  for (Index n : map.algebra.block_dims) blocks.push_back(n);
  Json kraus = Json::array();
  for (const auto& family : map.kraus) {
    Json list = Json::array();
    for (const CMatrix& v : family) list.push_back(matrix_to_json(v));
    kraus.push_back(std::move(list));
  }
  return Json{{"schema", kSchemaTag},
              {"algebra", Json{{"blocks", std::move(blocks)}}},
              {"out_dim", map.out_dim},
              {"unital", map.unital},
              {"kraus", std::move(kraus)}};
}

UcpMap ucp_from_json(const Json& value, const NumericContext& ctx, bool require_unital) {
  const Json& algebra_json = require_field(value, "algebra");
  const Json& blocks = require_field(algebra_json, "blocks");
  if (!blocks.is_array() || blocks.empty())
    raise(ErrorCode::ParseError, "algebra.blocks must be a nonempty array");
  FiniteCStarAlgebra algebra;
  for (const auto& b : blocks)
    algebra.block_dims.push_back(require_count(b, "block dimension"));
  Index out_dim = require_count(require_field(value, "out_dim"), "out_dim");
  const Json& kraus_json = require_field(value, "kraus");
  if (!kraus_json.is_array() ||
      kraus_json.size() != algebra.block_dims.size())
    raise(ErrorCode::ParseError, "kraus must have one list per block");
  std::vector<std::vector<CMatrix>> kraus;
  for (const auto& family : kraus_json) {
    if (!family.is_array())
      raise(ErrorCode::ParseError, "kraus entries must be arrays of matrices");
    std::vector<CMatrix> ops;
    for (const auto& op : family) ops.push_back(matrix_from_json(op));
    kraus.push_back(std::move(ops));
  }
  return ucp_from_kraus(algebra, out_dim, std::move(kraus), ctx, require_unital);
}

Json algebra_element_to_json(const AlgebraElement& a) {
  Json blocks = Json::array();
  for (const CMatrix& x : a.blocks) blocks.push_back(matrix_to_json(x));
  return Json{{"blocks", std::move(blocks)}};
}

AlgebraElement algebra_element_from_json(const Json& value) {
  const Json& blocks = require_field(value, "blocks");
  if (!blocks.is_array() || blocks.empty())
    raise(ErrorCode::ParseError, "element needs at least one block");
  AlgebraElement out;
  for (const auto& b : blocks) {
    CMatrix x = matrix_from_json(b);
    if (x.rows() != x.cols())
      raise(ErrorCode::ParseError, "element blocks must be square");
    out.algebra.block_dims.push_back(x.rows());
    out.blocks.push_back(std::move(x));
  }
  return out;
}

Json nest_to_json(const Nest& nest) {
  Json chain = Json::array();
  for (const Subspace& s : nest.chain) chain.push_back(matrix_to_json(s.basis));
  return Json{{"schema", kSchemaTag},
              {"ambient_dim", nest.ambient_dim},
              {"chain", std::move(chain)}};
}

Nest nest_from_json(const Json& value, const NumericContext& ctx) {
  Index ambient = require_count(require_field(value, "ambient_dim"), "ambient_dim");
  const Json& chain = require_field(value, "chain");
  if (!chain.is_array())
    raise(ErrorCode::ParseError, "chain must be an array of basis matrices");
  std::vector<Subspace> members;
  for (const auto& m : chain) {
    CMatrix basis = matrix_from_json(m);
    if (basis.rows() != ambient)
      raise(ErrorCode::ParseError, "chain member does not live in the ambient space");
    CMatrix gram = basis.adjoint() * basis;
    if (!approx_equal(gram, CMatrix::Identity(gram.rows(), gram.cols()), ctx.eps_eq))
      raise(ErrorCode::ParseError, "chain member basis is not orthonormal");
    members.push_back(Subspace{ambient, std::move(basis)});
  }
  return make_nest(ambient, std::move(members), ctx);
}

Json symbol_to_json(const TrigSymbol& sym) {
  Json coeffs = Json::array();
  for (const CMatrix& c : sym.coeffs) coeffs.push_back(matrix_to_json(c));
  return Json{{"schema", kSchemaTag},
              {"block", sym.block},
              {"degree", sym.degree},
              {"coeffs", std::move(coeffs)}};
}

TrigSymbol symbol_from_json(const Json& value, const NumericContext& ctx) {
  const Json& coeffs_json = require_field(value, "coeffs");
  if (!coeffs_json.is_array() || coeffs_json.empty())
    raise(ErrorCode::ParseError, "symbol needs at least one coefficient");
  std::vector<CMatrix> coeffs;
  for (const auto& c : coeffs_json) coeffs.push_back(matrix_from_json(c));
  if (value.contains("degree") &&
      require_count(value.at("degree"), "degree") !=
          static_cast<Index>(coeffs.size()) - 1)
    raise(ErrorCode::ParseError, "degree field disagrees with coefficient count");
  if (value.contains("block") &&
      require_count(value.at("block"), "block") != coeffs[0].rows())
    raise(ErrorCode::ParseError, "block field disagrees with coefficient shape");
  return make_trig_symbol(std::move(coeffs), ctx);
}

Json triple_to_json(const StinespringTriple& triple) {
  Json block_dims = Json::array();
  for (Index n : triple.rep.algebra.block_dims) block_dims.push_back(n);
  Json mults = Json::array();
  for (Index m : triple.rep.multiplicities) mults.push_back(m);
  return Json{{"schema", kSchemaTag},
              {"block_dims", std::move(block_dims)},
              {"multiplicities", std::move(mults)},
              {"total_dim", triple.rep.total_dim},
              {"out_dim", triple.map.out_dim},
              {"minimal", triple.minimal},
              {"v", matrix_to_json(triple.isometry)}};
}

Json certificate_to_json(const FZCertificate& cert) {
  Json residuals = Json::object();
  for (const auto& [key, val] : cert.residuals) residuals[key] = val;
  return Json{{"schema", kSchemaTag},
              {"d", matrix_to_json(cert.d)},
              {"s", matrix_to_json(cert.s)},
              {"z", matrix_to_json(cert.z)},
              {"residuals", std::move(residuals)}};
}

FZCertificate certificate_from_json(const Json& value) {
  FZCertificate cert;
  cert.d = matrix_from_json(require_field(value, "d"));
  cert.s = matrix_from_json(require_field(value, "s"));
  cert.z = matrix_from_json(require_field(value, "z"));
  if (value.contains("residuals"))
    for (auto it = value.at("residuals").begin(); it != value.at("residuals").end(); ++it)
      cert.residuals[it.key()] = it.value().get<double>();
  return cert;
}

Json decision_to_json(const DecisionReport& report) {
  Json out{{"schema", kSchemaTag},
           {"verdict", verdict_name(report.verdict)},
           {"notes", report.notes}};
  if (report.kernel_witness)
    out["witness"] = Json{{"kind", "commutant_kernel"},
                          {"operator", matrix_to_json(*report.kernel_witness)}};
  if (report.incomparable_witness)
    out["witness"] = Json{
        {"kind", "incomparable_ranges"},
        {"first", matrix_to_json(report.incomparable_witness->first.basis)},
        {"second", matrix_to_json(report.incomparable_witness->second.basis)}};
  if (report.residual) out["residual"] = *report.residual;
  if (report.m_reflexive) out["m_algebra_reflexive"] = *report.m_reflexive;
  if (report.decomposition) {
    Json summands = Json::array();
    for (const PureSummand& s : report.decomposition->summands)
      summands.push_back(Json{{"block", s.block},
                              {"multiplicity", s.multiplicity},
                              {"range", matrix_to_json(s.range_isometry)}});
    out["decomposition"] = std::move(summands);
  }
  return out;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::ParseError, "cannot open file: " + path);
  Json value = Json::parse(in, nullptr, false);
  if (value.is_discarded())
    raise(ErrorCode::ParseError, "invalid JSON in file: " + path);
  return value;
}

}  // namespace cstar
