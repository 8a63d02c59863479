/*
   Copyright 2026 The delaynet Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include <CLI11.hpp>

#include "delaynet/cli.hpp"

namespace {

void common(CLI::App* sub, delaynet::RunConfig& cfg) {
  sub->add_option("network", cfg.network, "Network JSON file")->required();
  sub->add_option("--lecs", cfg.lecs, "LEC assignment file, or 'ones'");
  sub->add_option("--field", cfg.field, "Field override, e.g. 2^6:1+x+x^6");
  sub->add_option("--seed", cfg.seed, "Random seed");
  sub->add_option("--trials", cfg.trials, "Random trials");
  sub->add_option("-o,--output", cfg.output, "Report path (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  delaynet::RunConfig cfg;
  CLI::App app{"Delay-network transfer, feasibility and alignment analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DELAYNET_VERSION);

  auto* ct = app.add_subcommand("compute-transfer", "Transfer matrices and demanded determinants");
  common(ct, cfg);

  auto* cf = app.add_subcommand("check-feasibility", "Classical or transform-domain solvability");
  common(cf, cfg);
  cf->add_option("--mode", cfg.mode, "classical | transform | search")
      ->check(CLI::IsMember({"classical", "transform", "search"}));
  cf->add_option("--n", cfg.n, "Transform length");
  cf->add_option("--alpha", cfg.alpha, "Order-n element or 'auto'");
  cf->add_option("--target", cfg.target, "Largest acceptable d_max / n");
  cf->add_option("--max-b", cfg.max_b, "Search bound on the field degree");
  cf->add_option("--max-n", cfg.max_n, "Search bound on n");

  auto* ts = app.add_subcommand("transform-simulate", "Cyclic-prefix transform run through the simulator");
  common(ts, cfg);
  ts->add_option("--n", cfg.n, "Transform length")->required();
  ts->add_option("--alpha", cfg.alpha, "Order-n element or 'auto'");
  ts->add_option("--inputs", cfg.inputs, "JSON object of per-source symbol vectors");

  auto* pb = app.add_subcommand("pbna-check", "Precoding-based alignment for three unicast sessions");
  common(pb, cfg);
  pb->add_option("--scheme", cfg.scheme, "1 | 2 | 2z | 3")->check(CLI::IsMember({"1", "2", "2z", "3"}));
  pb->add_option("--n1", cfg.n1);
  pb->add_option("--n2", cfg.n2);
  pb->add_option("--n3", cfg.n3);
  pb->add_option("--n", cfg.n, "Frame length (schemes 2, 2z)");
  pb->add_option("--nprime", cfg.nprime, "n' (schemes 1, 3)");
  pb->add_option("--k", cfg.k, "Block length (scheme 3)");
  pb->add_option("--strategy", cfg.strategy, "krylov | free")->check(CLI::IsMember({"krylov", "free"}));
  pb->add_option("--zero", cfg.zero, "Zero min-cut pair as source,sink (1-based)")->delimiter(',');

  auto* oo = app.add_subcommand("onoff-check", "Parity on-off schedule after delay-and-combine");
  common(oo, cfg);
  oo->add_option("cancellations", cfg.cancellations, "Cancellation rules JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return delaynet::run(cfg).status;
}
