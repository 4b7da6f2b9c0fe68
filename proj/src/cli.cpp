#include "dtr/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dtr/concrete.hpp"
#include "dtr/engine.hpp"
#include "dtr/evaluator.hpp"
#include "dtr/focus.hpp"

namespace dtr {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string readAll(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void diagnose(std::ostream& err, const Error& e, std::size_t step = 0) {
  err << codeName(e.code()) << ": ";
  if (step) err << "step " << step << ": ";
  if (const auto* se = dynamic_cast<const SyntaxError*>(&e))
    err << e.detail() << " @ " << se->line() << ":" << se->column() << "\n";
  else if (e.locations().empty())
    err << e.detail() << "\n";
  else
    for (std::size_t i = 0; i < e.locations().size(); ++i)
      err << (i ? "\n" + std::string(codeName(e.code())) + ": " : "") << e.detail() << " @ "
          << e.locations()[i] << (i + 1 == e.locations().size() ? "\n" : "");
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Datatype transformations for MiniFun modules", "dtr"};
  app.require_subcommand(1);
  std::string input = "-", output, focus, expr, opLine, scriptPath;
  bool passthrough = false;
  std::size_t fuel = kDefaultFuel;

  auto addIO = [&](CLI::App* c, bool withOutput) {
    c->add_option("-i,--input", input, "module file, - for stdin")->required();
    if (withOutput) {
      c->add_option("-o,--output", output, "write the module here instead of stdout");
      c->add_flag("--passthrough", passthrough, "echo the input unchanged on refusal");
    }
  };
  auto* apply = app.add_subcommand("apply", "apply one operator invocation");
  apply->add_option("op", opLine, "invocation, e.g. \"rename-type ConsList SnocList\"")
      ->required();
  addIO(apply, true);
  auto* script = app.add_subcommand("script", "run a transformation script");
  script->add_option("script", scriptPath, "script file (.trafo)")->required();
  addIO(script, true);
  auto* check = app.add_subcommand("check", "parse and check a module");
  addIO(check, false);
  auto* ops = app.add_subcommand("ops", "list the operators applicable at a focus");
  ops->add_option("--focus", focus, "selector; defaults to the focus marked in the module");
  addIO(ops, false);
  auto* fmt = app.add_subcommand("fmt", "pretty-print a module");
  addIO(fmt, true);
  auto* ev = app.add_subcommand("eval", "evaluate an expression over a module");
  ev->add_option("-e,--expr", expr, "closed expression")->required();
  ev->add_option("--fuel", fuel, "evaluation step budget");
  addIO(ev, false);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kCliOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kCliOk;
  } catch (const CLI::ParseError& e) {
    err << "BadArguments: " << e.what() << "\n";
    return kCliUsage;
  }

  std::string source;
  Module m;
  try {
    source = readAll(input, in);
    m = parseModule(source);
  } catch (const UsageError& e) {
    err << "BadArguments: " << e.what() << "\n";
    return kCliUsage;
  } catch (const Error& e) {
    diagnose(err, e);
    return kCliUsage;
  }

  auto emit = [&](const std::string& text) {
    if (output.empty()) {
      out << text;
      return true;
    }
    std::ofstream f(output, std::ios::binary);
    if (!f) return false;
    f << text;
    return static_cast<bool>(f);
  };
  auto finish = [&](const TrafoResult& r) {
    if (!r.ok) {
      diagnose(err, Error(r.code, r.detail, r.locations), r.failedStep);
      if (passthrough) emit(source);
      return static_cast<int>(kCliRefused);
    }
    for (const auto& t : r.todos) err << "todo: " << toString(t) << "\n";
    if (!emit(printModule(r.module))) {
      err << "BadArguments: cannot write " << output << "\n";
      return static_cast<int>(kCliUsage);
    }
    return static_cast<int>(kCliOk);
  };

  try {
    if (*apply) {
      OpInvocation inv = parseInvocation(opLine);
      if (inv.op == "extract") {
        Session s(m);
        return finish(s.apply(inv));
      }
      return finish(applyOp(m, inv));
    }
    if (*script) {
      Script s;
      try {
        s = parseScript(readAll(scriptPath, in));
      } catch (const Error& e) {
        diagnose(err, e);
        return kCliUsage;
      }
      return finish(runScript(m, s));
    }
    if (*check) {
      out << "ok: " << m.decls.size() << " declarations\n";
      return kCliOk;
    }
    if (*fmt) return finish(TrafoResult::success(m));
    if (*ops) {
      std::optional<FocusTarget> f;
      if (!focus.empty()) f = parseFocusTarget(focus);
      else if (countFoci(m) > 0) f = focusToSelector(m);
      for (const auto& inv : applicableOps(m, f)) out << inv.toString() << "\n";
      return kCliOk;
    }
    if (*ev) {
      Expr e;
      try {
        e = parseExpr(expr);
      } catch (const Error& x) {
        diagnose(err, x);
        return kCliUsage;
      }
      out << printValue(eval(m, e, fuel)) << "\n";
      return kCliOk;
    }
  } catch (const UsageError& e) {
    err << "BadArguments: " << e.what() << "\n";
    return kCliUsage;
  } catch (const Error& e) {
    diagnose(err, e);
    return e.code() == ErrorCode::BadArguments || e.code() == ErrorCode::SyntaxError
               ? kCliUsage
               : kCliRefused;
  }
  return kCliUsage;
}

}  // namespace dtr
