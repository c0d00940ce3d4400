// Batch experiment front end: reduce | simulate | lemmas | sweep.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "unent/cli.hpp"

namespace {

// Values from --config (JSON) override command-line flags.
nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  return nlohmann::json::parse(unent::read_file(path));
}

template <typename T>
void override_from(const nlohmann::json& j, const char* key, T& value) {
  if (j.contains(key)) value = j.at(key).get<T>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale simulator for an unentangled-witness SAT protocol"};
  app.require_subcommand(1);

  std::string config_path;

  unent::ReduceConfig rcfg;
  auto* reduce = app.add_subcommand("reduce", "reduce a 3SAT instance to balanced 2-out-of-4");
  reduce->add_option("--input", rcfg.input, "3SAT instance file")->required();
  reduce->add_option("--cert", rcfg.cert_out, "certificate output path");
  reduce->add_option("--c", rcfg.c, "balance parameter");
  reduce->add_option("--cap", rcfg.cap, "brute-force variable cap");
  reduce->add_flag("--no-measure", [&rcfg](std::int64_t) { rcfg.measure = false; },
                   "skip gap measurement");
  reduce->add_option("--config", config_path, "JSON config overriding flags");

  unent::SimulateConfig scfg;
  auto* simulate = app.add_subcommand("simulate", "run protocol trials against a strategy");
  simulate->add_option("--cert", scfg.cert_path, "reduction certificate path")->required();
  simulate->add_option("--strategy", scfg.strategy, "honest|concentrated|phased|nonidentical");
  simulate->add_option("--sigma", scfg.sigma, "phase noise std dev");
  simulate->add_option("--delta", scfg.delta, "overlap slack for nonidentical witnesses");
  simulate->add_option("--support-frac", scfg.support_frac, "support fraction for concentrated");
  simulate->add_option("--beta", scfg.beta, "witness count factor, K = ceil(beta sqrt(N))");
  simulate->add_option("--k", scfg.k_override, "explicit witness count (overrides beta)");
  simulate->add_option("--trials", scfg.trials, "number of protocol runs");
  simulate->add_option("--seed", scfg.seed, "master seed");
  simulate->add_option("--assignment", scfg.assignment, "source assignment bits for honest");
  simulate->add_option("--cap", scfg.cap, "brute-force variable cap");
  simulate->add_option("--records", scfg.records_out, "trial records output path (JSONL)");
  simulate->add_option("--summary", scfg.summary_out, "summary output path");
  simulate->add_option("--config", config_path, "JSON config overriding flags");

  unent::LemmasConfig lcfg;
  auto* lemmas = app.add_subcommand("lemmas", "run the lemma-check battery");
  lemmas->add_option("--seed", lcfg.seed, "master seed");
  lemmas->add_option("--scale", lcfg.scale, "trial count scale factor");
  lemmas->add_option("--report", lcfg.report_out, "report output path");
  lemmas->add_option("--config", config_path, "JSON config overriding flags");

  unent::SweepConfig wcfg;
  auto* sweep = app.add_subcommand("sweep", "witness-format sweep over (N, beta, strategy)");
  sweep->add_option("--dims", wcfg.dims, "state dimensions N")->delimiter(',');
  sweep->add_option("--betas", wcfg.betas, "beta values")->delimiter(',');
  sweep->add_option("--strategies", wcfg.strategies, "strategy names")->delimiter(',');
  sweep->add_option("--trials", wcfg.trials, "trials per cell");
  sweep->add_option("--seed", wcfg.seed, "master seed");
  sweep->add_option("--sigma", wcfg.sigma, "phase noise std dev");
  sweep->add_option("--delta", wcfg.delta, "overlap slack");
  sweep->add_option("--support-frac", wcfg.support_frac, "support fraction");
  sweep->add_option("--csv", wcfg.csv_out, "CSV output path");
  sweep->add_option("--config", config_path, "JSON config overriding flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    nlohmann::json cj = load_config(config_path);
    if (reduce->parsed()) {
      override_from(cj, "input", rcfg.input);
      override_from(cj, "cert", rcfg.cert_out);
      override_from(cj, "c", rcfg.c);
      override_from(cj, "cap", rcfg.cap);
      override_from(cj, "measure", rcfg.measure);
      std::cout << unent::cmd_reduce(rcfg).dump(2) << '\n';
    } else if (simulate->parsed()) {
      override_from(cj, "cert", scfg.cert_path);
      override_from(cj, "strategy", scfg.strategy);
      override_from(cj, "sigma", scfg.sigma);
      override_from(cj, "delta", scfg.delta);
      override_from(cj, "support_frac", scfg.support_frac);
      override_from(cj, "beta", scfg.beta);
      override_from(cj, "k", scfg.k_override);
      override_from(cj, "trials", scfg.trials);
      override_from(cj, "seed", scfg.seed);
      override_from(cj, "assignment", scfg.assignment);
      override_from(cj, "cap", scfg.cap);
      override_from(cj, "records", scfg.records_out);
      override_from(cj, "summary", scfg.summary_out);
      std::cout << unent::cmd_simulate(scfg).dump(2) << '\n';
    } else if (lemmas->parsed()) {
      override_from(cj, "seed", lcfg.seed);
      override_from(cj, "scale", lcfg.scale);
      override_from(cj, "report", lcfg.report_out);
      nlohmann::json rep = unent::cmd_lemmas(lcfg);
      std::cout << rep.dump(2) << '\n';
      if (!rep.at("all_pass").get<bool>()) return 4;
    } else if (sweep->parsed()) {
      override_from(cj, "dims", wcfg.dims);
      override_from(cj, "betas", wcfg.betas);
      override_from(cj, "strategies", wcfg.strategies);
      override_from(cj, "trials", wcfg.trials);
      override_from(cj, "seed", wcfg.seed);
      override_from(cj, "sigma", wcfg.sigma);
      override_from(cj, "delta", wcfg.delta);
      override_from(cj, "support_frac", wcfg.support_frac);
      override_from(cj, "csv", wcfg.csv_out);
      std::cout << unent::cmd_sweep(wcfg);
    }
  } catch (const unent::input_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const unent::precondition_error& e) {
    std::cerr << "precondition error: " << e.what() << '\n';
    return 3;
  } catch (const unent::refusal_error& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 3;
  } catch (const unent::check_error& e) {
    std::cerr << "check failure: " << e.what() << '\n';
    return 4;
  } catch (const unent::construction_error& e) {
    std::cerr << "internal construction failure: " << e.what() << '\n';
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
