#!/usr/bin/env python3
"""Freeze reference-assembler encodings for the ISA tests.

Each vector is an assembly snippet plus the ProgramBuilder calls that must
produce identical bytes. Expansion pairs assemble a compressed instruction
and its 32-bit expansion at label T. Needs clang with the RISC-V target and
readelf; the output (isa_vectors.inc) is committed so tests do not.
"""
import os
import re
import subprocess
import sys
import tempfile

VECTORS = [
    ("lui x5, 0x12345", "b.lui(5, 0x12345);"),
    ("auipc x6, 0xfffff", "b.auipc(6, 0xfffff);"),
    ("addi x1, x0, 5", "b.addi(1, 0, 5);"),
    ("addi x15, x14, -2048", "b.addi(15, 14, -2048);"),
    ("addi x2, x2, 2047", "b.addi(2, 2, 2047);"),
    ("slti x3, x4, -1", "b.slti(3, 4, -1);"),
    ("sltiu x3, x4, 1", "b.sltiu(3, 4, 1);"),
    ("xori x5, x6, -1", "b.xori(5, 6, -1);"),
    ("ori x7, x8, 0x7ff", "b.ori(7, 8, 0x7ff);"),
    ("andi x9, x10, 0xf0", "b.andi(9, 10, 0xf0);"),
    ("slli x11, x12, 31", "b.slli(11, 12, 31);"),
    ("srli x13, x14, 1", "b.srli(13, 14, 1);"),
    ("srai x15, x1, 7", "b.srai(15, 1, 7);"),
    ("add x1, x2, x3", "b.add(1, 2, 3);"),
    ("sub x4, x5, x6", "b.sub(4, 5, 6);"),
    ("sll x7, x8, x9", "b.sll(7, 8, 9);"),
    ("slt x10, x11, x12", "b.slt(10, 11, 12);"),
    ("sltu x13, x14, x15", "b.sltu(13, 14, 15);"),
    ("xor x1, x15, x8", "b.xor_(1, 15, 8);"),
    ("srl x2, x3, x4", "b.srl(2, 3, 4);"),
    ("sra x5, x6, x7", "b.sra(5, 6, 7);"),
    ("or x8, x9, x10", "b.or_(8, 9, 10);"),
    ("and x11, x12, x13", "b.and_(11, 12, 13);"),
    ("lb x1, -1(x2)", "b.lb(1, -1, 2);"),
    ("lh x3, 2(x4)", "b.lh(3, 2, 4);"),
    ("lw x3, 2044(x4)", "b.lw(3, 2044, 4);"),
    ("lbu x5, 0(x6)", "b.lbu(5, 0, 6);"),
    ("lhu x7, -2(x8)", "b.lhu(7, -2, 8);"),
    ("sb x5, -2048(x6)", "b.sb(5, -2048, 6);"),
    ("sh x9, 6(x10)", "b.sh(9, 6, 10);"),
    ("sw x11, 2047(x12)", "b.sw(11, 2047, 12);"),
    ("jalr x1, 12(x5)", "b.jalr(1, 5, 12);"),
    ("jalr x0, 0(x1)", "b.jalr(0, 1, 0);"),
    ("fence", "b.fence();"),
    ("ecall", "b.ecall();"),
    ("ebreak", "b.ebreak();"),
    ("mret", "b.mret();"),
    ("wfi", "b.wfi();"),
    ("csrrw x1, 0x7c0, x2", "b.csrrw(1, 0x7c0, 2);"),
    ("csrrs x3, mstatus, x0", "b.csrrs(3, 0x300, 0);"),
    ("csrrc x4, mie, x5", "b.csrrc(4, 0x304, 5);"),
    ("csrrwi x0, 0x7c0, 1", "b.csrrwi(0, 0x7c0, 1);"),
    ("csrrsi x6, mstatus, 8", "b.csrrsi(6, 0x300, 8);"),
    ("csrrci x7, 0x7c0, 31", "b.csrrci(7, 0x7c0, 31);"),
    ("csrrs x8, mcycle, x0", "b.csrrs(8, 0xb00, 0);"),
    (".insn r4 0x0b, 3, 0, x10, x11, x12, x13", "b.mmul(10, 11, 12, 13, 4);"),
    (".insn r4 0x0b, 7, 3, x15, x1, x2, x3", "b.mmul(15, 1, 2, 3, 32);"),
    (".insn r4 0x0b, 0, 0, x0, x0, x0, x0", "b.mmul(0, 0, 0, 0, 1);"),
    ("beq x1, x2, 1f\n addi x0, x0, 0\n1:",
     "{ Label l = b.newLabel(); b.beq(1, 2, l); b.nop(); b.bind(l); }"),
    ("1: addi x0, x0, 0\n bne x3, x4, 1b",
     "{ Label l = b.newLabel(); b.bind(l); b.nop(); b.bne(3, 4, l); }"),
    ("blt x5, x6, 1f\n1:", "{ Label l = b.newLabel(); b.blt(5, 6, l); b.bind(l); }"),
    ("bge x7, x8, 1f\n1:", "{ Label l = b.newLabel(); b.bge(7, 8, l); b.bind(l); }"),
    ("bltu x9, x10, 1f\n1:", "{ Label l = b.newLabel(); b.bltu(9, 10, l); b.bind(l); }"),
    ("bgeu x11, x12, 1f\n1:", "{ Label l = b.newLabel(); b.bgeu(11, 12, l); b.bind(l); }"),
    ("jal x1, 1f\n addi x0, x0, 0\n addi x0, x0, 0\n1:",
     "{ Label l = b.newLabel(); b.jal(1, l); b.nop(); b.nop(); b.bind(l); }"),
    ("1: jal x0, 1b", "{ Label l = b.newLabel(); b.bind(l); b.jal(0, l); }"),
]

RVC_VECTORS = [
    ("c.nop", "b.c_nop();"),
    ("c.addi x10, -3", "b.c_addi(10, -3);"),
    ("c.li x10, 0", "b.c_li(10, 0);"),
    ("c.li x15, 31", "b.c_li(15, 31);"),
    ("c.lui x5, 31", "b.c_lui(5, 31);"),
    ("c.lui x6, 1", "b.c_lui(6, 1);"),
    ("c.addi16sp sp, -64", "b.c_addi16sp(-64);"),
    ("c.addi16sp sp, 496", "b.c_addi16sp(496);"),
    ("c.addi4spn x8, sp, 1020", "b.c_addi4spn(8, 1020);"),
    ("c.addi4spn x15, sp, 4", "b.c_addi4spn(15, 4);"),
    ("c.srli x8, 3", "b.c_srli(8, 3);"),
    ("c.srai x9, 31", "b.c_srai(9, 31);"),
    ("c.andi x10, -1", "b.c_andi(10, -1);"),
    ("c.andi x11, 21", "b.c_andi(11, 21);"),
    ("c.sub x8, x9", "b.c_sub(8, 9);"),
    ("c.xor x10, x11", "b.c_xor(10, 11);"),
    ("c.or x12, x13", "b.c_or(12, 13);"),
    ("c.and x14, x15", "b.c_and(14, 15);"),
    ("c.slli x1, 5", "b.c_slli(1, 5);"),
    ("c.mv x5, x6", "b.c_mv(5, 6);"),
    ("c.add x7, x8", "b.c_add(7, 8);"),
    ("c.jr x1", "b.c_jr(1);"),
    ("c.jalr x5", "b.c_jalr(5);"),
    ("c.ebreak", "b.c_ebreak();"),
    ("c.lw x8, 124(x15)", "b.c_lw(8, 124, 15);"),
    ("c.sw x9, 4(x8)", "b.c_sw(9, 4, 8);"),
    ("c.lwsp x1, 252(sp)", "b.c_lwsp(1, 252);"),
    ("c.swsp x15, 0(sp)", "b.c_swsp(15, 0);"),
    ("c.beqz x8, 1f\n c.nop\n1:",
     "{ Label l = b.newLabel(); b.c_beqz(8, l); b.c_nop(); b.bind(l); }"),
    ("1: c.nop\n c.bnez x15, 1b",
     "{ Label l = b.newLabel(); b.bind(l); b.c_nop(); b.c_bnez(15, l); }"),
    ("c.j 1f\n c.nop\n c.nop\n1:",
     "{ Label l = b.newLabel(); b.c_j(l); b.c_nop(); b.c_nop(); b.bind(l); }"),
    ("1: c.jal 1b", "{ Label l = b.newLabel(); b.bind(l); b.c_jal(l); }"),
]

# (compressed snippet, expansion snippet); the instruction under test is at T.
EXPANSIONS = [
    ("T: c.nop", "T: addi x0, x0, 0"),
    ("T: c.addi x10, -3", "T: addi x10, x10, -3"),
    ("T: c.li x10, 0", "T: addi x10, x0, 0"),
    ("T: c.li x15, -32", "T: addi x15, x0, -32"),
    ("T: c.lui x5, 31", "T: lui x5, 31"),
    ("T: c.lui x5, 0xfffe0", "T: lui x5, 0xfffe0"),
    ("T: c.addi16sp sp, -64", "T: addi sp, sp, -64"),
    ("T: c.addi4spn x8, sp, 1020", "T: addi x8, sp, 1020"),
    ("T: c.srli x8, 3", "T: srli x8, x8, 3"),
    ("T: c.srai x9, 31", "T: srai x9, x9, 31"),
    ("T: c.andi x10, -1", "T: andi x10, x10, -1"),
    ("T: c.sub x8, x9", "T: sub x8, x8, x9"),
    ("T: c.xor x10, x11", "T: xor x10, x10, x11"),
    ("T: c.or x12, x13", "T: or x12, x12, x13"),
    ("T: c.and x14, x15", "T: and x14, x14, x15"),
    ("T: c.slli x1, 5", "T: slli x1, x1, 5"),
    ("T: c.mv x5, x6", "T: add x5, x0, x6"),
    ("T: c.add x7, x8", "T: add x7, x7, x8"),
    ("T: c.jr x1", "T: jalr x0, 0(x1)"),
    ("T: c.jalr x5", "T: jalr x1, 0(x5)"),
    ("T: c.ebreak", "T: ebreak"),
    ("T: c.lw x8, 124(x15)", "T: lw x8, 124(x15)"),
    ("T: c.sw x9, 4(x8)", "T: sw x9, 4(x8)"),
    ("T: c.lwsp x1, 252(sp)", "T: lw x1, 252(sp)"),
    ("T: c.swsp x15, 0(sp)", "T: sw x15, 0(sp)"),
    ("T: c.beqz x8, 1f\n c.nop\n1:", "T: beq x8, x0, 1f\n1:"),
    ("c.nop\n1: c.nop\nT: c.bnez x15, 1b", ".2byte 1\n1: .2byte 1\nT: bne x15, x0, 1b"),
    ("T: c.j 1f\n c.nop\n1:", "T: jal x0, 1f\n1:"),
    ("1: c.nop\nT: c.jal 1b", "1: .2byte 1\nT: jal x1, 1b"),
]


def assemble(src, rvc):
    with tempfile.TemporaryDirectory() as d:
        s = os.path.join(d, "t.s")
        o = os.path.join(d, "t.o")
        with open(s, "w") as f:
            f.write(".text\n.option %s\n%s\n" % ("rvc" if rvc else "norvc", src))
        subprocess.run(["clang", "--target=riscv32", "-march=rv32ec", "-mno-relax",
                        "-c", s, "-o", o], check=True)
        dump = subprocess.run(["readelf", "-x", ".text", o], check=True,
                              capture_output=True, text=True).stdout
        data = bytearray()
        for line in dump.splitlines():
            m = re.match(r"\s+0x[0-9a-f]+ ((?:[0-9a-f]+ ){1,4})", line)
            if m:
                data += bytes.fromhex("".join(m.group(1).split()))
        syms = subprocess.run(["readelf", "-s", o], check=True,
                              capture_output=True, text=True).stdout
        t = None
        for line in syms.splitlines():
            parts = line.split()
            if len(parts) >= 8 and parts[7] == "T":
                t = int(parts[1], 16)
        return bytes(data), t


def main(out):
    lines = ["// Generated by gen_isa_vectors.py from clang --target=riscv32 -march=rv32ec.",
             "// Do not edit by hand.", ""]
    lines.append("static const AsmVector kAsmVectors[] = {")
    for rvc, table in ((False, VECTORS), (True, RVC_VECTORS)):
        for asm, cpp in table:
            data, _ = assemble(asm, rvc)
            bs = ", ".join("0x%02x" % x for x in data)
            text = asm.replace("\n", ";").replace('"', '\\"')
            lines.append('  {"%s", {%s}, [](ProgramBuilder& b) { %s }},' % (text, bs, cpp))
    lines.append("};")
    lines.append("")
    lines.append("static const ExpansionVector kExpansionVectors[] = {")
    for comp, exp in EXPANSIONS:
        cdata, ct = assemble(comp, True)
        edata, et = assemble(exp, False)
        half = cdata[ct] | (cdata[ct + 1] << 8)
        word = int.from_bytes(edata[et:et + 4], "little")
        assert word & 3 == 3, exp
        text = comp.replace("\n", ";").replace('"', '\\"')
        lines.append('  {"%s", 0x%04x, 0x%08x},' % (text, half, word))
    lines.append("};")
    with open(out, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else
         os.path.join(os.path.dirname(os.path.abspath(__file__)), "isa_vectors.inc"))
