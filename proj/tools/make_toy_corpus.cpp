// Writes a synthetic corpus whose reference summaries copy injected sentences.
#include <CLI11.hpp>

#include <cstdio>

#include "multigras/corpus.hpp"
#include "multigras/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic corpus generator"};
  multigras::synthetic::ToyCorpusOptions opts;
  std::uint64_t seed = 1;
  std::string output;
  app.add_option("--output", output, "Corpus JSONL")->required();
  app.add_option("--seed", seed, "Generator seed")->capture_default_str();
  app.add_option("--documents", opts.documents, "Number of documents")->capture_default_str();
  app.add_option("--min-sentences", opts.min_sentences, "")->capture_default_str();
  app.add_option("--max-sentences", opts.max_sentences, "")->capture_default_str();
  app.add_option("--min-tokens", opts.min_tokens, "")->capture_default_str();
  app.add_option("--max-tokens", opts.max_tokens, "")->capture_default_str();
  app.add_option("--oracle-per-doc", opts.oracle_per_doc, "Injected summary sentences")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    const auto toy = multigras::synthetic::make_toy_corpus(seed, opts);
    multigras::save_corpus(output, toy.corpus);
    std::printf("wrote %zu documents -> %s\n", toy.corpus.size(), output.c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
