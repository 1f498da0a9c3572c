// abl: alignment-based grammar induction and crossing-brackets evaluation.
//
//   abl learn    --input corpus.txt --output out/
//   abl select   --space out/space.tsv --output out/
//   abl eval     --learned out/selected.txt --gold gold.txt
//   abl baseline --gold gold.txt --direction right --output out/
//   abl run      --gold gold.txt --alignment all --selection branch --trials 10

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "abl/pipeline.hpp"

namespace {

struct Flags {
    std::string alignment = "default";
    std::string selection = "branch";
    std::string mean;
    std::string direction = "right";
    std::string from_manifest;
    bool no_shuffle = false;
};

abl::RunConfig resolve(const Flags &flags, abl::RunConfig config) {
    config.alignment = abl::parse_alignment(flags.alignment);
    config.selection = abl::parse_selection(flags.selection);
    if (!flags.mean.empty()) config.mean = abl::parse_mean(flags.mean);
    config.direction = abl::parse_direction(flags.direction);
    config.shuffle = !flags.no_shuffle;
    abl::validate(config);
    return config;
}

void add_method_flags(CLI::App *cmd, Flags &flags, abl::RunConfig &config) {
    cmd->add_option("--alignment", flags.alignment, "default | biased | all")
        ->check(CLI::IsMember({"default", "biased", "all"}));
    cmd->add_option("--selection", flags.selection, "incr | leaf | branch")
        ->check(CLI::IsMember({"incr", "leaf", "branch"}));
    cmd->add_option("--mean", flags.mean, "geo | geo+ (leaf and branch only)")
        ->check(CLI::IsMember({"geo", "geo+"}));
    cmd->add_option("--min-length", config.min_length,
                    "sentences shorter than this are not aligned")
        ->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Alignment-based learning of constituent structure"};
    app.set_version_flag("--version", abl::kToolVersion);
    app.require_subcommand(1);

    abl::RunConfig config;
    Flags flags;
    std::string output;

    auto *learn = app.add_subcommand("learn", "align a plain corpus and write its hypothesis space");
    learn->add_option("--input", config.input, "plain corpus, one sentence per line")->required();
    add_method_flags(learn, flags, config);
    learn->add_option("--output", output, "output directory");

    auto *select = app.add_subcommand("select", "select non-crossing constituents from a space");
    select->add_option("--space", config.space, "tabular hypothesis space")->required();
    select->add_option("--input", config.input, "plain corpus to verify the space against");
    add_method_flags(select, flags, config);
    select->add_option("--seed", config.seed, "tie-break seed");
    select->add_option("--output", output, "output directory");

    auto *eval = app.add_subcommand("eval", "NCBP, NCBR and ZCS of a learned corpus");
    eval->add_option("--learned", config.learned, "bracketed learned corpus")->required();
    eval->add_option("--gold", config.gold, "bracketed gold treebank")->required();
    eval->add_flag("--exclude-trivial-brackets", config.exclude_trivial,
                   "ignore width-1 and whole-sentence brackets");
    eval->add_option("--output", output, "directory for metrics files");

    auto *baseline = app.add_subcommand("baseline", "right- or left-branching structures");
    baseline->add_option("--gold", config.gold, "gold treebank (also evaluates)");
    baseline->add_option("--input", config.input, "plain corpus");
    baseline->add_option("--direction", flags.direction, "right | left")
        ->check(CLI::IsMember({"right", "left"}));
    baseline->add_flag("--exclude-trivial-brackets", config.exclude_trivial,
                       "ignore width-1 and whole-sentence brackets");
    baseline->add_option("--output", output, "output directory");

    auto *run = app.add_subcommand("run", "repeated learn/select/eval trials against a treebank");
    run->add_option("--gold", config.gold, "gold treebank; stripped before learning");
    add_method_flags(run, flags, config);
    run->add_option("--trials", config.trials, "number of trials")->check(CLI::PositiveNumber);
    run->add_option("--seed", config.seed, "master seed");
    run->add_flag("--no-shuffle", flags.no_shuffle, "keep corpus order in incr trials");
    run->add_flag("--exclude-trivial-brackets", config.exclude_trivial,
                  "ignore width-1 and whole-sentence brackets");
    run->add_option("--from-manifest", flags.from_manifest, "re-run a previous run.manifest")
        ->excludes("--gold");
    run->add_option("--output", output, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed() && !flags.from_manifest.empty()) {
            std::ifstream in(flags.from_manifest);
            if (!in) throw abl::DataError("cannot read manifest '" + flags.from_manifest + "'");
            config = abl::config_from_manifest(abl::read_manifest(in));
        } else {
            config = resolve(flags, config);
        }
        config.output = output;

        if (learn->parsed()) abl::cmd_learn(config, std::cout);
        else if (select->parsed()) abl::cmd_select(config, std::cout);
        else if (eval->parsed()) abl::cmd_eval(config, std::cout);
        else if (baseline->parsed()) abl::cmd_baseline(config, std::cout);
        else if (run->parsed()) {
            if (config.gold.empty()) throw abl::UsageError("run needs --gold or --from-manifest");
            abl::cmd_run(config, std::cout);
        }
    } catch (const abl::UsageError &e) {
        std::cerr << "abl: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "abl: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
