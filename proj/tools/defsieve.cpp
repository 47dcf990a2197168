// defsieve command line interface: q-expansions, eigenvalues, reducibility
// detection, local screens, and the per-prime obstruction classification for
// the six level-1 rational newforms or ingested eigenvalue files.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <defsieve/defsieve.hpp>

namespace {

constexpr std::size_t kDefaultTerms = 2000;

std::string weight_check(const std::string& s) {
    static const std::set<std::string> allowed{"12", "16", "18", "20", "22", "26"};
    if (allowed.count(s)) return {};
    return "UnsupportedWeight: weight must be one of 12, 16, 18, 20, 22, 26";
}

std::string prime_check(const std::string& s) {
    std::uint64_t v = 0;
    if (!defsieve::detail::parse_u64(s, v) || !defsieve::is_prime(v))
        return "'" + s + "' is not a prime";
    return {};
}

std::string prime_set_check(const std::string& s) {
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = defsieve::detail::trim(item);
        if (item.empty()) continue;
        std::uint64_t p = 0;
        if (!defsieve::detail::parse_u64(item, p) || !defsieve::is_prime(p))
            return "'" + item + "' is not a prime";
    }
    return {};
}

std::vector<std::uint64_t> parse_prime_set(const std::string& list) {
    std::vector<std::uint64_t> out;
    std::string item;
    std::stringstream ss(list);
    while (std::getline(ss, item, ',')) {
        item = defsieve::detail::trim(item);
        if (item.empty()) continue;
        std::uint64_t p = 0;
        defsieve::detail::parse_u64(item, p);
        out.push_back(p);
    }
    return out;
}

defsieve::NewformData builtin_data(unsigned weight, std::uint64_t bound) {
    defsieve::QExpansion f = defsieve::cached_level1_form(
        weight, static_cast<std::size_t>(bound) + 1, defsieve::cache_dir_from_env());
    return defsieve::NewformData::from_expansion(f, weight, bound);
}

std::string factorization_text(const defsieve::Factorization& f) {
    std::ostringstream out;
    if (f.sign < 0) out << "-";
    if (f.factors.empty()) {
        out << "1";
        return out.str();
    }
    for (std::size_t i = 0; i < f.factors.size(); ++i) {
        if (i) out << " * ";
        out << f.factors[i].prime;
        if (f.factors[i].exponent > 1) out << "^" << f.factors[i].exponent;
    }
    return out.str();
}

int run(int argc, char** argv) {
    CLI::App app{"obstruction sieve for modular deformation problems"};
    app.require_subcommand(1);
    CLI::Validator weight_validator(weight_check, "WEIGHT");
    CLI::Validator prime_validator(prime_check, "PRIME");
    CLI::Validator prime_set_validator(prime_set_check, "PRIMESET");

    unsigned weight = 12;
    std::uint64_t prime = 2, bound = 2000, lmin = 2, lmax = 100;
    std::size_t terms = kDefaultTerms;
    std::string out_file, ingest_file, set_arg, format = "text";

    auto* qexp = app.add_subcommand("qexp", "emit (and cache) a level-1 q-expansion");
    qexp->add_option("--weight", weight, "weight of the form")
        ->required()
        ->check(weight_validator);
    qexp->add_option("--terms", terms, "number of coefficients")
        ->required()
        ->check(CLI::Range(std::size_t(2), std::size_t(2'000'000)));
    qexp->add_option("-o,--output", out_file, "write to this file instead of stdout");

    auto* eigen = app.add_subcommand("eigen", "print the Hecke eigenvalue a_p");
    eigen->add_option("--weight", weight, "weight of the form")
        ->required()
        ->check(weight_validator);
    eigen->add_option("--prime", prime, "the prime p")->required()->check(prime_validator);

    auto* reducible = app.add_subcommand(
        "reducible", "detect primes with reducible mod-ell representation");
    reducible->add_option("--weight", weight, "weight of the form")
        ->required()
        ->check(weight_validator);
    reducible->add_option("--bound", bound, "congruences tested for all primes p <= bound")
        ->required()
        ->check(CLI::Range(std::uint64_t(200), std::uint64_t(1'000'000)));

    auto* screen = app.add_subcommand("screen", "unramified local screen at a prime p");
    screen->add_option("--weight", weight, "weight of the form")
        ->required()
        ->check(weight_validator);
    screen->add_option("--prime", prime, "the prime p")->required()->check(prime_validator);

    auto* classify = app.add_subcommand(
        "classify", "classify every prime ell in a range as (un)obstructed");
    auto* input = classify->add_option_group("input", "form source");
    input->add_option("--weight", weight, "weight of a builtin form")
        ->check(weight_validator);
    input->add_option("--ingest", ingest_file, "eigenvalue CSV file")
        ->check(CLI::ExistingFile);
    input->require_option(1);
    classify->add_option("--set", set_arg, "comma-separated ramification set S")
        ->check(prime_set_validator);
    classify->add_option("--lmin", lmin, "lower end of the prime range")->required();
    classify->add_option("--lmax", lmax, "upper end of the prime range")
        ->required()
        ->check(CLI::Range(std::uint64_t(2), std::uint64_t(1'000'000)));
    classify->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "text"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors are exit 1, help/version 0
    }

    if (qexp->parsed()) {
        defsieve::QExpansion f =
            defsieve::cached_level1_form(weight, terms, defsieve::cache_dir_from_env());
        std::string body = defsieve::qexp_to_string(f.truncated(terms), weight);
        if (out_file.empty())
            std::cout << body;
        else
            defsieve::write_file_atomic(out_file, body);
        return 0;
    }

    if (eigen->parsed()) {
        auto data = builtin_data(weight, std::max<std::uint64_t>(prime, kDefaultTerms - 1));
        std::cout << data.a(prime) << "\n";
        return 0;
    }

    if (reducible->parsed()) {
        auto data = builtin_data(weight, std::max<std::uint64_t>(bound, kDefaultTerms - 1));
        auto certs = defsieve::reducible_primes(data, bound);
        std::cout << "# weight=" << weight << " bound=" << bound << "\n";
        for (const auto& c : certs) std::cout << c.ell << " a=" << c.exponent_a << "\n";
        return 0;
    }

    if (screen->parsed()) {
        auto data = builtin_data(weight, std::max<std::uint64_t>(prime, kDefaultTerms - 1));
        auto report = defsieve::local_screen_unramified(data, prime);
        std::cout << "p=" << report.p << "\n";
        std::cout << "delta_p=" << report.delta_p << "\n";
        std::cout << "factorization=" << factorization_text(report.delta_factorization)
                  << "\n";
        std::cout << "eps_candidates=";
        for (std::size_t i = 0; i < report.eps_candidates.size(); ++i)
            std::cout << (i ? " " : "") << report.eps_candidates[i];
        std::cout << "\n";
        std::cout << "candidates=";
        for (std::size_t i = 0; i < report.candidates.size(); ++i)
            std::cout << (i ? " " : "") << report.candidates[i];
        std::cout << "\n";
        return 0;
    }

    if (classify->parsed()) {
        auto t0 = std::chrono::steady_clock::now();
        std::vector<std::uint64_t> S = parse_prime_set(set_arg);
        defsieve::Classification result;
        if (!ingest_file.empty()) {
            auto data = defsieve::ingest_newform(ingest_file);
            result = defsieve::classify(data, S, lmin, lmax);
        } else {
            std::uint64_t needed = std::max<std::uint64_t>(2 * lmax, kDefaultTerms);
            for (std::uint64_t p : S) needed = std::max(needed, p + 1);
            auto data = builtin_data(weight, needed);
            result = defsieve::classify(data, S, lmin, lmax);
        }
        if (format == "json")
            std::cout << defsieve::emit_report_json(result);
        else
            std::cout << defsieve::emit_report_text(result);
        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
        std::cerr << "# classify completed in " << elapsed << " ms\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const defsieve::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
