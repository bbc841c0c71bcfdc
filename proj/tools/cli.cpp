#include "cli.hpp"

#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ek/selftest.hpp"
#include "ek/verify.hpp"

namespace ek::cli {

namespace {

using nlohmann::ordered_json;

constexpr int kBallDigits = 20;

ordered_json elem_json(const QuadElem& x) {
  return ordered_json{{"a", x.a().get_str()},
                      {"b", x.b().get_str()},
                      {"d", x.d()},
                      {"trace", x.trace().get_str()},
                      {"norm", x.norm().get_str()},
                      {"str", x.str()}};
}

ordered_json ball_json(const RealBall& b) {
  return ordered_json{{"lo", b.dec_lo(kBallDigits)}, {"hi", b.dec_hi(kBallDigits)}};
}

ordered_json record_json(const ApproxRecord& rec, long p) {
  ordered_json j;
  if (rec.exact_qr) {
    j["q"] = rec.q.get_str();
    j["r"] = rec.r.get_str();
  } else {
    j["q"] = ordered_json{{"residue", rec.q.get_str()},
                          {"modulus", std::to_string(p) + "^" + std::to_string(rec.vp + 8)}};
    j["r"] = ordered_json{{"residue", rec.r.get_str()},
                          {"modulus", std::to_string(p) + "^" + std::to_string(rec.vp + 8)}};
  }
  ordered_json np;
  if (rec.kind == "thm1_imaginary") {
    np["n"] = rec.n1;
  } else if (rec.kind == "thm1_real") {
    np["n1"] = rec.n1;
    np["n2"] = rec.n2;
  } else {
    np["n"] = rec.n_big.get_str();
    np["N"] = rec.targetN;
  }
  j["n_params"] = np;
  j["real_lo"] = rec.real_err.dec_lo(kBallDigits);
  j["real_hi"] = rec.real_err.dec_hi(kBallDigits);
  if (rec.vp_infinite) {
    j["vp"] = "inf";
  } else {
    j["vp"] = rec.vp;
  }
  j["product_lo"] = rec.ek_plus.dec_lo(kBallDigits);
  j["product_hi"] = rec.ek_plus.dec_hi(kBallDigits);
  j["log_product_hi"] = rec.log_product.dec_hi(kBallDigits);
  return j;
}

std::string record_csv_row(const ApproxRecord& rec) {
  std::ostringstream os;
  std::string np;
  if (rec.kind == "thm1_imaginary") {
    np = "n=" + std::to_string(rec.n1);
  } else if (rec.kind == "thm1_real") {
    np = "n1=" + std::to_string(rec.n1) + ";n2=" + std::to_string(rec.n2);
  } else {
    np = "n=" + rec.n_big.get_str() + ";N=" + std::to_string(rec.targetN);
  }
  os << (rec.exact_qr ? rec.q.get_str() : "mod:" + rec.q.get_str()) << ","
     << (rec.exact_qr ? rec.r.get_str() : "mod:" + rec.r.get_str()) << "," << np << ","
     << rec.real_err.dec_lo(kBallDigits) << "," << rec.real_err.dec_hi(kBallDigits) << ","
     << (rec.vp_infinite ? std::string("inf") : std::to_string(rec.vp)) << ","
     << rec.ek_plus.dec_lo(kBallDigits) << "," << rec.ek_plus.dec_hi(kBallDigits) << ","
     << rec.log_product.dec_hi(kBallDigits);
  return os.str();
}

void emit_records(const std::vector<ApproxRecord>& recs, long p, bool json, bool csv,
                  std::ostream& out) {
  if (json) {
    for (const ApproxRecord& rec : recs) out << record_json(rec, p).dump() << "\n";
    return;
  }
  if (csv) {
    out << "q,r,n_params,real_lo,real_hi,vp,product_lo,product_hi,log_product_hi\n";
    for (const ApproxRecord& rec : recs) out << record_csv_row(rec) << "\n";
    return;
  }
  for (const ApproxRecord& rec : recs) {
    out << rec.kind << " ";
    if (rec.kind == "thm1_imaginary") {
      out << "n=" << rec.n1;
    } else if (rec.kind == "thm1_real") {
      out << "n1=" << rec.n1 << " n2=" << rec.n2;
    } else {
      out << "n=" << rec.n_big.get_str() << " N=" << rec.targetN;
    }
    if (rec.exact_qr) {
      std::string qs = rec.q.get_str(), rs = rec.r.get_str();
      auto clip = [](std::string& s) {
        if (s.size() > 40) s = s.substr(0, 18) + "..." + s.substr(s.size() - 18) + "(" +
                               std::to_string(s.size()) + "d)";
      };
      clip(qs);
      clip(rs);
      out << " q=" << qs << " r=" << rs;
    } else {
      out << " q,r unmaterialized (residues available via --json)";
    }
    out << " vp=" << (rec.vp_infinite ? std::string("inf") : std::to_string(rec.vp))
        << " |qa-r|<=" << rec.real_err.dec_hi(10)
        << " product<=" << rec.ek_plus.dec_hi(10) << "\n";
  }
}

void verify_records(const std::vector<ApproxRecord>& recs, const RealSpec& alpha,
                    const PadicSpec& beta, long p) {
  for (const ApproxRecord& rec : recs) {
    if (!rec.exact_qr) continue;
    PadicFactor f = qbr_valuation(rec.q, rec.r, beta, p);
    if (f.infinite != rec.vp_infinite || (!f.infinite && f.v != rec.vp))
      throw DomainError("verification failed: independent valuation disagrees");
    if (rec.q == 0 || rec.r == 0) continue;
    RealBall again = ek_product(rec.q, rec.r, alpha, beta, p, MetricVariant::EKPlus);
    if (again.lo_rat() > rec.ek_plus.hi_rat() || again.hi_rat() < rec.ek_plus.lo_rat())
      throw DomainError("verification failed: independent product enclosure is disjoint");
  }
}

ordered_json unit_system_json(const UnitSystem& us) {
  ordered_json j;
  switch (us.kind) {
    case UnitSystem::Kind::RealThm1: j["kind"] = "real_thm1"; break;
    case UnitSystem::Kind::ImaginaryThm1: j["kind"] = "imaginary_thm1"; break;
    case UnitSystem::Kind::Thm2: j["kind"] = "thm2"; break;
  }
  j["d"] = us.d;
  j["p"] = us.p;
  if (us.omega1.has_value()) j["omega1"] = elem_json(*us.omega1);
  if (us.omega2.has_value()) j["omega2"] = elem_json(*us.omega2);
  if (us.eta.has_value()) j["eta"] = elem_json(*us.eta);
  if (us.zeta.has_value()) j["zeta"] = elem_json(*us.zeta);
  if (us.t != 0) j["t"] = us.t;
  if (us.nu != 0) j["nu"] = us.nu;
  return j;
}

std::vector<long> parse_N_list(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stol(item));
  }
  if (out.empty()) throw ParseError("empty N list");
  return out;
}

int run_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact-arithmetic witnesses for simultaneous real/p-adic approximation"};
  app.require_subcommand(1);
  long prec_cap_bits = 0;
  app.add_option("--prec-cap", prec_cap_bits,
                 "adaptive precision cap in bits (also EKWIT_PREC_CAP)");

  // field-info
  auto* cmd_field = app.add_subcommand("field-info", "quadratic field data");
  long fi_d = 0, fi_p = 0;
  bool fi_json = false;
  cmd_field->add_option("--d", fi_d, "squarefree d")->required();
  cmd_field->add_option("--p", fi_p, "odd prime for splitting info");
  cmd_field->add_flag("--json", fi_json, "JSON output");

  // units
  auto* cmd_units = app.add_subcommand("units", "unit system for (d, p)");
  long u_d = 0, u_p = 0, u_kmax = 8, u_coeff = 1000000, u_prec = 32;
  bool u_json = false;
  cmd_units->add_option("--d", u_d)->required();
  cmd_units->add_option("--p", u_p)->required();
  cmd_units->add_option("--kmax", u_kmax, "norm exponent bound for the p-unit search");
  cmd_units->add_option("--coeff-bound", u_coeff, "coordinate bound for the p-unit search");
  cmd_units->add_option("--prec-n", u_prec, "p-adic working precision");
  cmd_units->add_flag("--json", u_json);

  // construct (thm1 | thm2)
  auto* cmd_construct = app.add_subcommand("construct", "witness sequences");
  cmd_construct->require_subcommand(1);
  std::string c_alpha, c_beta, c_N = "4,8";
  long c_p = 0;
  long c_count = 3;
  long c_prec = 0;
  bool c_json = false, c_csv = false, c_verify = false;
  auto* cmd_thm1 = cmd_construct->add_subcommand("thm1", "quadratic p-adic target");
  cmd_thm1->add_option("--alpha", c_alpha)->required();
  cmd_thm1->add_option("--beta", c_beta)->required();
  cmd_thm1->add_option("--p", c_p)->required();
  cmd_thm1->add_option("--count", c_count);
  cmd_thm1->add_option("--prec-n", c_prec, "p-adic working precision");
  cmd_thm1->add_flag("--json", c_json);
  cmd_thm1->add_flag("--csv", c_csv);
  cmd_thm1->add_flag("--verify", c_verify, "re-check records independently");
  auto* cmd_thm2 = cmd_construct->add_subcommand("thm2", "quadratic real target");
  cmd_thm2->add_option("--alpha", c_alpha)->required();
  cmd_thm2->add_option("--beta", c_beta)->required();
  cmd_thm2->add_option("--p", c_p)->required();
  cmd_thm2->add_option("--N", c_N, "comma-separated congruence depths");
  cmd_thm2->add_option("--prec-n", c_prec);
  cmd_thm2->add_flag("--json", c_json);
  cmd_thm2->add_flag("--csv", c_csv);
  cmd_thm2->add_flag("--verify", c_verify);

  // scan
  auto* cmd_scan = app.add_subcommand("scan", "record chain of EK+ products");
  std::string s_alpha, s_beta, s_strategy = "exhaustive";
  long s_p = 0, s_qmax = 0, s_kmax = 3;
  int s_threads = 1;
  bool s_json = false;
  cmd_scan->add_option("--alpha", s_alpha)->required();
  cmd_scan->add_option("--beta", s_beta)->required();
  cmd_scan->add_option("--p", s_p)->required();
  cmd_scan->add_option("--qmax", s_qmax)->required();
  cmd_scan->add_option("--kmax", s_kmax);
  cmd_scan->add_option("--strategy", s_strategy, "exhaustive | residue_window");
  cmd_scan->add_option("--threads", s_threads);
  cmd_scan->add_flag("--json", s_json);

  // bound
  auto* cmd_bound = app.add_subcommand("bound", "conjugate-pair lower bound certificate");
  std::string b_f;
  long b_p = 0;
  bool b_json = false;
  cmd_bound->add_option("--f", b_f, "a,b,c of f = aX^2+bX+c")->required();
  cmd_bound->add_option("--p", b_p)->required();
  cmd_bound->add_flag("--json", b_json);

  // selftest
  auto* cmd_self = app.add_subcommand("selftest", "acceptance suite");
  long self_id = 0;
  cmd_self->add_option("--criterion", self_id, "run only this criterion (1..8)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  }
  if (prec_cap_bits > 0) set_prec_cap(prec_cap_bits);

  if (cmd_field->parsed()) {
    QuadField f(fi_d);
    ordered_json j{{"d", f.d}, {"ring_shift", f.ring_shift}};
    if (fi_d > 1) j["fundamental_unit"] = elem_json(fundamental_unit(fi_d));
    if (fi_p != 0) {
      try {
        EmbeddingData emb = embed_field(f, fi_p, 8);
        j["p"] = fi_p;
        j["splitting"] = emb.split() ? "split" : "inert";
        if (emb.split()) j["branch"] = emb.branch().get_str();
      } catch (const RamifiedUnsupported&) {
        j["p"] = fi_p;
        j["splitting"] = "ramified";
      }
    }
    if (fi_json) {
      out << j.dump(2) << "\n";
    } else {
      out << "d = " << f.d << ", ring_shift = " << (f.ring_shift ? "yes" : "no") << "\n";
      if (j.contains("fundamental_unit"))
        out << "fundamental unit: " << j["fundamental_unit"]["str"].get<std::string>() << "\n";
      if (j.contains("splitting"))
        out << "p = " << fi_p << ": " << j["splitting"].get<std::string>()
            << (j.contains("branch") ? ", branch " + j["branch"].get<std::string>() : "")
            << "\n";
    }
    return 0;
  }

  if (cmd_units->parsed()) {
    QuadField f(u_d);
    ordered_json j;
    if (u_d > 1) {
      EmbeddingData emb = embed_field(f, u_p, u_prec);
      UnitSystem us;
      us.kind = UnitSystem::Kind::RealThm1;
      us.d = u_d;
      us.p = u_p;
      us.omega1 = make_omega1_real(u_d);
      PUnitPair pu = p_unit_search(f, emb, u_kmax, u_coeff);
      us.omega2 = pu.omega2;
      us.eta = pu.eta;
      us.t = pu.t;
      j = unit_system_json(us);
      ZetaResult z = normalize_zeta(u_d, u_p, u_prec);
      j["zeta"] = elem_json(z.zeta);
      j["nu"] = z.nu;
      j["valuations"] =
          ordered_json{{"vP_omega2", emb.vP(pu.omega2)},
                       {"vP_conj_omega2", emb.vP(pu.omega2.conj())}};
    } else {
      EmbeddingData emb = embed_field(f, u_p, u_prec);
      ImaginaryPUnit iw = make_omega1_imaginary(f, emb, u_kmax, u_coeff);
      UnitSystem us;
      us.kind = UnitSystem::Kind::ImaginaryThm1;
      us.d = u_d;
      us.p = u_p;
      us.omega1 = iw.omega1;
      us.eta = iw.eta;
      us.t = iw.t;
      j = unit_system_json(us);
      j["valuations"] = ordered_json{{"vP_omega1", emb.vP(iw.omega1)},
                                     {"vP_conj_omega1", emb.vP(iw.omega1.conj())}};
    }
    if (u_json) {
      out << j.dump(2) << "\n";
    } else {
      out << j.dump(2) << "\n";
    }
    return 0;
  }

  if (cmd_construct->parsed()) {
    RealSpec alpha = RealSpec::parse(c_alpha);
    PadicSpec beta = PadicSpec::parse(c_beta);
    ConstructOptions opt;
    if (cmd_thm1->parsed()) {
      if (c_prec > 0) opt.padic_N = c_prec;
      if (beta.kind != PadicSpec::Kind::Quad)
        throw InadmissibleInput("thm1 needs a quadratic beta spec");
      std::vector<ApproxRecord> recs;
      if (beta.d < 0) {
        Thm1ImaginaryRun run(alpha, beta, c_p, opt);
        recs = run.records(static_cast<size_t>(c_count));
      } else {
        Thm1RealRun run(alpha, beta, c_p, opt);
        recs = run.records(static_cast<size_t>(c_count));
      }
      if (c_verify) verify_records(recs, alpha, beta, c_p);
      emit_records(recs, c_p, c_json, c_csv, out);
    } else {
      std::vector<long> Ns = parse_N_list(c_N);
      long maxN = *std::max_element(Ns.begin(), Ns.end());
      opt.padic_N = c_prec > 0 ? c_prec : std::max(48L, maxN + 24);
      Thm2Run run(alpha, beta, c_p, opt);
      std::vector<ApproxRecord> recs = run.records(Ns);
      if (c_verify) verify_records(recs, alpha, beta, c_p);
      emit_records(recs, c_p, c_json, c_csv, out);
    }
    return 0;
  }

  if (cmd_scan->parsed()) {
    RealSpec alpha = RealSpec::parse(s_alpha);
    PadicSpec beta = PadicSpec::parse(s_beta);
    ScanStrategy strat;
    if (s_strategy == "exhaustive") {
      strat = ScanStrategy::Exhaustive;
    } else if (s_strategy == "residue_window") {
      strat = ScanStrategy::ResidueWindow;
    } else {
      throw ParseError("unknown strategy: " + s_strategy);
    }
    ScanOptions opt;
    opt.k_max = s_kmax;
    opt.threads = s_threads;
    auto chain = scan_records(alpha, beta, s_p, s_qmax, strat, opt);
    if (s_json) {
      for (const auto& row : chain) {
        ordered_json j{{"q", row.q},
                       {"r", row.r},
                       {"product_lo", row.product.dec_lo(kBallDigits)},
                       {"product_hi", row.product.dec_hi(kBallDigits)}};
        out << j.dump() << "\n";
      }
    } else {
      out << "q,r,product_lo,product_hi\n";
      for (const auto& row : chain)
        out << row.q << "," << row.r << "," << row.product.dec_lo(kBallDigits) << ","
            << row.product.dec_hi(kBallDigits) << "\n";
    }
    return 0;
  }

  if (cmd_bound->parsed()) {
    std::stringstream ss(b_f);
    std::string item;
    std::vector<Int> coeffs;
    while (std::getline(ss, item, ',')) coeffs.emplace_back(item);
    if (coeffs.size() != 3) throw ParseError("--f expects a,b,c");
    BoundCertificate cert = conjugate_lower_bound(coeffs[0], coeffs[1], coeffs[2], b_p);
    ordered_json j{{"f", {coeffs[0].get_str(), coeffs[1].get_str(), coeffs[2].get_str()}},
                   {"p", cert.p},
                   {"d_core", cert.d_core},
                   {"alpha", cert.alpha_root.str()},
                   {"alpha_conj", cert.alpha_other.str()},
                   {"branch", cert.branch.get_str()},
                   {"a_abs_p", cert.a_abs_p.get_str()},
                   {"beta_conj_abs", cert.beta_other_abs.get_str()},
                   {"c0_exact", cert.c0_exact.str()},
                   {"c0_lo", cert.c0.dec_lo(kBallDigits)},
                   {"c0_hi", cert.c0.dec_hi(kBallDigits)}};
    if (b_json) {
      out << j.dump(2) << "\n";
    } else {
      out << "c0 = " << cert.c0_exact.str() << " in [" << cert.c0.dec_lo(10) << ", "
          << cert.c0.dec_hi(10) << "]\n";
    }
    return 0;
  }

  if (cmd_self->parsed()) {
    if (self_id != 0) {
      CriterionResult r = acceptance_criterion(static_cast<int>(self_id));
      out << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << ": " << r.name
          << " (" << r.seconds << " s) " << r.detail << "\n";
      return r.pass ? 0 : 1;
    }
    auto rs = run_acceptance(&out);
    for (const auto& r : rs)
      if (!r.pass) return 1;
    return 0;
  }

  err << "no subcommand\n";
  return 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run_impl(args, out, err);
  } catch (const Error& e) {
    ordered_json j{{"error", e.code()}, {"message", e.what()}};
    err << j.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    ordered_json j{{"error", "Internal"}, {"message", e.what()}};
    err << j.dump() << "\n";
    return 1;
  }
}

}  // namespace ek::cli
