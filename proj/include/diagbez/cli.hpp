#pragma once

// Batch front end: extract, check, repair, solve, realize, dims, eval, mesh.
// Exit codes: 0 success, 1 usage/IO/validation error, 2 inadmissible pair
// (check only).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "diagbez/constraints.hpp"
#include "diagbez/diagonals.hpp"
#include "diagbez/io.hpp"

namespace diagbez::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInadmissible = 2;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void emit(const std::string& path, const std::string& bytes, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << bytes;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  f << bytes;
  if (!f) throw Error(ErrorCode::InvalidArgument, "write to '" + path + "' failed");
}

inline io::Document load(const std::string& path) {
  try {
    return io::read_document(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

inline Slot parse_slot_key(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::Parse, "free value key '" + key + "' is not \"i,j\"");
  try {
    std::size_t used_i = 0, used_j = 0;
    const std::string a = key.substr(0, comma), b = key.substr(comma + 1);
    Slot s{std::stoi(a, &used_i), std::stoi(b, &used_j)};
    if (used_i != a.size() || used_j != b.size()) throw std::invalid_argument(key);
    return s;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::Parse, "free value key '" + key + "' is not \"i,j\"");
  }
}

/// {"i,j": [x, y, z], ...} given inline or as a file path.
inline FreeValues parse_free_values(const std::string& arg) {
  const std::string text = !arg.empty() && arg.front() == '{' ? arg : read_file(arg);
  io::Json j;
  try {
    j = io::Json::parse(text);
  } catch (const io::Json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("free values: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Parse, "free values must be an object keyed by \"i,j\"");
  FreeValues out;
  for (auto it = j.begin(); it != j.end(); ++it) out[parse_slot_key(it.key())] = io::detail::point(it.value(), "/" + it.key());
  return out;
}

inline std::string format_point(const Point& p) {
  std::string s;
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    if (c) s += ' ';
    io::detail::append_number(s, p(c));
  }
  return s;
}

}  // namespace detail

/// Runs one command line. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bezier patches with prescribed main diagonals", "diagbez"};
  app.require_subcommand(1);

  std::string input, output;
  double tol = kDefaultTolerance;
  std::string repair_mode, free_arg, fill_arg, mode_arg;
  int degree = 0, samples = 16;
  double u = 0.0, v = 0.0;
  bool with_diagonals = false;

  auto* extract = app.add_subcommand("extract", "Diagonal pair of a net");
  extract->add_option("net", input, "net document")->required();
  extract->add_option("-o,--output", output, "output pair document (default stdout)");

  auto* check = app.add_subcommand("check", "Admissibility report of a diagonal pair (exit 2 if inadmissible)");
  check->add_option("pair", input, "diagonal_pair document")->required();
  check->add_option("--tol", tol, "relative tolerance")->check(CLI::PositiveNumber);

  auto* rep = app.add_subcommand("repair", "Make a diagonal pair admissible");
  rep->add_option("pair", input, "diagonal_pair document")->required();
  rep->add_option("--mode", repair_mode, "central | elevate | project")
      ->required()
      ->check(CLI::IsMember({"central", "elevate", "project"}));
  rep->add_option("-o,--output", output, "output pair document (default stdout)");

  auto* solve = app.add_subcommand("solve", "Solution space of a prescription");
  solve->add_option("prescription", input, "prescription document")->required();
  solve->add_option("-o,--output", output, "output solution_space document (default stdout)");

  auto* realize_cmd = app.add_subcommand("realize", "Net of a solution space for given free values");
  realize_cmd->add_option("space", input, "solution_space document")->required();
  realize_cmd->add_option("--free", free_arg, "free values: JSON object {\"i,j\": [x,y,z]} or a file holding one");
  realize_cmd->add_option("--fill", fill_arg, "fill for missing free values: coons | dirichlet")
      ->check(CLI::IsMember({"coons", "dirichlet"}));
  realize_cmd->add_option("-o,--output", output, "output net document (default stdout)");

  auto* dims = app.add_subcommand("dims", "Dimension of the solution space for degree N");
  dims->add_option("n", degree, "surface degree")->required()->check(CLI::PositiveNumber);
  dims->add_option("--mode", mode_arg, "diagonals | boundary | c1")
      ->required()
      ->check(CLI::IsMember({"diagonals", "boundary", "c1"}));

  auto* eval = app.add_subcommand("eval", "Evaluate a net at (u, v)");
  eval->add_option("net", input, "net document")->required();
  eval->add_option("--u", u, "first parameter")->required()->check(CLI::Range(0.0, 1.0));
  eval->add_option("--v", v, "second parameter")->required()->check(CLI::Range(0.0, 1.0));

  auto* mesh = app.add_subcommand("mesh", "Export a triangulated surface as OBJ");
  mesh->add_option("net", input, "net document")->required();
  mesh->add_option("--samples", samples, "cells per parameter direction")->check(CLI::PositiveNumber);
  mesh->add_flag("--diagonals", with_diagonals, "append both diagonal curves as polylines");
  mesh->add_option("-o,--output", output, "output OBJ file (default stdout)");

  std::vector<const char*> argv{"diagbez"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "diagbez: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (*extract) {
      const auto net = detail::load(input).as<ControlNet>();
      detail::emit(output, io::write_document(extract_diagonals(net)), out);
    } else if (*check) {
      const auto pair = detail::load(input).as<DiagonalPair>();
      const auto report = check_compatibility(pair, tol);
      out << io::write_document(report);
      return report.admissible ? kExitOk : kExitInadmissible;
    } else if (*rep) {
      const auto pair = detail::load(input).as<DiagonalPair>();
      detail::emit(output, io::write_document(repair(pair, parse_repair_mode(repair_mode))), out);
    } else if (*solve) {
      const auto p = detail::load(input).as<Prescription>();
      detail::emit(output, io::write_document(solve_space(build_system(p))), out);
    } else if (*realize_cmd) {
      auto space = detail::load(input).as<SolutionSpace>();
      if (!fill_arg.empty()) {
        const auto filled = fill_free(space, parse_fill_strategy(fill_arg));
        for (std::size_t f = 0; f < space.free_slots.size(); ++f) space.defaults[f] = filled.at(space.free_slots[f]);
      }
      const FreeValues values = free_arg.empty() ? FreeValues{} : detail::parse_free_values(free_arg);
      detail::emit(output, io::write_document(realize(space, values)), out);
    } else if (*dims) {
      const auto info = dimension_formula(degree, parse_prescription_mode(mode_arg));
      out << info.dimension << "\n" << "formula_exempt " << (info.formula_exempt ? "true" : "false") << "\n";
    } else if (*eval) {
      const auto net = detail::load(input).as<ControlNet>();
      out << detail::format_point(eval_surface(net, u, v)) << "\n";
    } else if (*mesh) {
      const auto net = detail::load(input).as<ControlNet>();
      detail::emit(output, io::export_mesh(net, samples, with_diagonals), out);
    }
  } catch (const PrescriptionError& e) {
    err << "diagbez: " << to_string(e.code()) << ": " << e.what() << "\n";
    for (const auto& r : e.residuals()) err << "  residual " << detail::format_point(r) << "\n";
    return kExitError;
  } catch (const Error& e) {
    err << "diagbez: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "diagbez: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}

}  // namespace diagbez::cli
