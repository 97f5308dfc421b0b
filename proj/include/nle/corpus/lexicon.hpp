// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string_view>

namespace nle::corpus {

/// Bundled 2000-word lexicon of short pronounceable words used by the
/// reference-text generator. Generated once from a fixed syllable inventory
/// and frozen here so corpora are reproducible without external files.
inline constexpr std::array<std::string_view, 2000> kLexicon = {
    "lainast", "cu", "flock", "taick", "waiflo", "sou", "lundgem", "ong", "groutai", "daidie",
    "mop", "mound", "jea", "aishai", "siend", "fiepsun", "muhie", "ne", "pupries", "vaitho",
    "luk", "cram", "vier", "foo", "boost", "zip", "ie", "zor", "pohous", "lotra",
    "nudra", "mean", "bou", "sad", "ootno", "gora", "fea", "zooser", "aiwind", "ai",
    "moujam", "corzou", "uck", "beam", "nushea", "wud", "vost", "sloo", "ni", "aik",
    "kel", "wier", "pegre", "sespai", "ieho", "bie", "trie", "tru", "thie", "brou",
    "pounou", "iegem", "oung", "voos", "mea", "voo", "sairt", "op", "honind", "la",
    "ve", "preap", "fana", "zaicai", "nead", "pool", "trak", "skuwed", "esea", "souk",
    "zeaju", "koupzai", "stund", "teagrai", "pril", "gru", "tie", "zoo", "veabous", "gus",
    "ookem", "buwat", "fe", "toort", "moospo", "kaick", "head", "ahom", "zendbai", "geambou",
    "ce", "ze", "vepou", "pra", "wimhie", "ied", "sai", "pur", "andhert", "loweapu",
    "koplea", "coun", "sieng", "prooba", "ealoot", "gouvool", "geand", "mouck", "leanai", "kearoon",
    "stie", "pouveng", "most", "ke", "gaboon", "miepkon", "cie", "mek", "droom", "tit",
    "ge", "beastni", "speadad", "sas", "prund", "ugou", "hai", "raip", "gritear", "gin",
    "hoowar", "biegie", "noong", "guk", "fou", "jou", "flemust", "rart", "bieck", "mame",
    "gigrie", "deam", "nir", "chor", "iend", "koo", "nai", "veastes", "wouzang", "bost",
    "era", "wea", "ujou", "ru", "faigai", "tive", "ehai", "flost", "zusack", "ka",
    "pea", "chi", "ud", "trus", "iep", "crulu", "kaisack", "aimies", "josoong", "notal",
    "gie", "iem", "deari", "laigool", "greacin", "nirt", "feam", "sesund", "ri", "fo",
    "noo", "covie", "dan", "us", "uco", "airt", "kiedeal", "flouku", "ak", "sa",
    "crutsle", "wethoop", "baigeas", "wuskoo", "imoubo", "bonair", "vom", "taind", "husoos", "he",
    "kago", "wek", "gudeane", "dou", "dreadce", "jean", "stul", "cuskais", "und", "nienirt",
    "cruwo", "aiswie", "plail", "niend", "hind", "eator", "fai", "saivien", "as", "graran",
    "choubut", "zeage", "wou", "rie", "thoosli", "sacro", "mik", "sal", "bai", "jai",
    "fiert", "os", "woohuck", "vu", "joufem", "wu", "vobrea", "moo", "crea", "toohir",
    "cufis", "kirt", "em", "boong", "gi", "zou", "shoost", "zaind", "ploo", "hou",
    "kebrang", "kaitie", "thea", "ucaip", "dre", "boum", "pro", "shod", "ceart", "die",
    "iezou", "jes", "boubu", "piert", "tound", "jin", "slanba", "pip", "jeal", "re",
    "luni", "ceafea", "vou", "fa", "paick", "witeast", "liert", "sucer", "ezu", "diefie",
    "chemok", "sastou", "jook", "suli", "koort", "woo", "han", "baist", "jen", "fooko",
    "ain", "le", "nos", "waigai", "beavond", "zest", "dithou", "wai", "troong", "lous",
    "kou", "or", "eagu", "eal", "goond", "ook", "ca", "zai", "lu", "tho",
    "hodepra", "hoodeap", "hiend", "be", "pucou", "ho", "sust", "gro", "drie", "vil",
    "falart", "cunaiza", "zer", "haistve", "boon", "zoock", "steast", "estspum", "ihes", "kona",
    "pieruck", "pam", "pebe", "za", "noul", "pad", "iegai", "kathou", "urvie", "wook",
    "dout", "we", "mashom", "wool", "vid", "kie", "oo", "gajol", "ploust", "siest",
    "savas", "flou", "plook", "mi", "ba", "kost", "nucaid", "toobe", "siejou", "zaifand",
    "dool", "zie", "hea", "crust", "artcea", "kovai", "utea", "vie", "ead", "slak",
    "risti", "nook", "pai", "kazast", "pi", "el", "fad", "zu", "zi", "tusli",
    "jaihea", "aidcoo", "chear", "riekie", "ing", "wie", "mikes", "colep", "tust", "coung",
    "gracem", "estu", "nie", "ofi", "trosti", "pem", "faip", "ta", "hond", "moos",
    "agrutin", "tickla", "bil", "ploon", "skert", "zait", "near", "lawi", "zouviem", "koojai",
    "wi", "ongstou", "furool", "crulil", "vohoo", "skedi", "neng", "zain", "rourt", "no",
    "zoubie", "skes", "voukema", "trun", "shievo", "spous", "cerous", "thai", "doogang", "the",
    "booted", "nasheas", "oven", "woup", "keng", "ebe", "gen", "ma", "mud", "gri",
    "nea", "cogu", "thoor", "pigous", "gasthou", "fi", "cust", "li", "gurtku", "nok",
    "lou", "ti", "nien", "kied", "tiep", "zimout", "vul", "ruri", "wa", "woop",
    "vea", "flup", "goucu", "moodcer", "flai", "nufort", "micanu", "fuzaip", "ekoufo", "kebreat",
    "heakai", "pland", "fago", "groteak", "faikou", "pospai", "haikut", "fograng", "bout", "spai",
    "ondgie", "doot", "saigou", "obe", "brudra", "zing", "dooda", "riest", "surt", "grieng",
    "grouck", "naid", "vargu", "tahu", "too", "ceaflod", "flod", "na", "broo", "du",
    "fid", "lut", "laispi", "cea", "ea", "hap", "sair", "ul", "beachi", "lort",
    "heap", "roloono", "stoost", "carun", "over", "niehour", "cou", "zivea", "boofou", "skie",
    "sheal", "hud", "lie", "jo", "jiep", "mul", "waivea", "wap", "igoort", "heast",
    "thu", "pie", "zobro", "fouvou", "sliet", "door", "bufoo", "start", "ebou", "keweang",
    "tou", "nu", "lihairt", "ien", "hicaist", "maim", "fetdo", "gea", "rat", "hugiend",
    "joofort", "telsak", "shepgre", "kon", "tim", "goukist", "out", "sashai", "shejaip", "tu",
    "thuslo", "ad", "soock", "loulou", "riesa", "po", "ha", "gogoond", "geagel", "foor",
    "su", "invoun", "aind", "bre", "rerouze", "leme", "top", "ciebang", "wirtgro", "rienou",
    "keack", "gert", "boospie", "zopa", "mip", "tea", "jitaick", "woushak", "haing", "jashi",
    "brie", "doop", "zak", "brougem", "wend", "vaip", "fezand", "zanmea", "flea", "tous",
    "jeand", "zoode", "gaturt", "gou", "tootwea", "teaplo", "tre", "boucest", "mackhoo", "tiet",
    "tap", "lieja", "cekviet", "ou", "jajaing", "chiebai", "rund", "giefeak", "urt", "cap",
    "japibou", "mai", "koospi", "giene", "lea", "dai", "siged", "fiehoot", "deaflu", "haiwiet",
    "si", "sla", "voutgea", "diek", "fiet", "bacroon", "sezon", "koost", "hoolu", "zoru",
    "painaim", "zem", "spoo", "fofa", "erea", "ski", "flirt", "katou", "loust", "reas",
    "lievem", "sta", "cekou", "cridoum", "vaist", "chefi", "geang", "gricirt", "je", "epe",
    "roolthe", "bouhem", "car", "loum", "mu", "teappa", "hiep", "jeano", "slo", "okous",
    "sleand", "grailie", "him", "jieti", "hubu", "woukum", "rep", "steagea", "goo", "hon",
    "popist", "soogie", "oowiem", "loshort", "pa", "ova", "kat", "ound", "tigiep", "meproup",
    "wenead", "ehe", "zaige", "mol", "cieju", "foun", "zedka", "kert", "zo", "cieng",
    "tresai", "bicurt", "heru", "kai", "tast", "kopie", "wudem", "sha", "ouhok", "rend",
    "prend", "skaslai", "tock", "gali", "trool", "pisriet", "wil", "maing", "jaisti", "cast",
    "ouk", "vop", "wurt", "rethied", "fli", "keart", "buling", "geart", "pral", "zimplop",
    "lipnem", "bifi", "goot", "riebit", "puthiek", "duckhas", "sielart", "earie", "zea", "hie",
    "nost", "zielu", "tirand", "ragear", "grifea", "houprou", "poo", "god", "sisou", "sted",
    "lietoo", "jud", "tuci", "hem", "spoopre", "raisoju", "skoo", "tiel", "vebind", "furt",
    "joom", "shuneng", "mup", "ast", "fart", "houkou", "akoost", "hu", "muco", "go",
    "sovor", "sapa", "prouhi", "heagra", "feand", "rooco", "biepza", "colou", "dreal", "slanso",
    "zaick", "cai", "droonai", "aifa", "bos", "proot", "doonot", "steahou", "jaicea", "ouwaik",
    "roust", "geneang", "she", "geak", "peacou", "hiebiel", "chugrai", "wip", "eaba", "fojan",
    "fouspa", "lo", "feape", "vitfead", "vuzoock", "min", "seloock", "wajie", "soocrai", "bea",
    "chouk", "wo", "jeamul", "ort", "dremeak", "ier", "loun", "mewod", "brai", "sewoos",
    "uwing", "raibrea", "foom", "seapi", "zim", "kea", "wocand", "skilais", "zobip", "troojop",
    "iso", "koond", "joukai", "zouck", "lougi", "chemsle", "dungdou", "ingshou", "nesta", "taigrie",
    "ieck", "flusza", "drand", "gepli", "goort", "kejail", "hagemou", "kaing", "sko", "beafas",
    "ceaki", "ond", "vend", "kais", "coozous", "faid", "jait", "spourt", "spushou", "diber",
    "stoo", "floop", "ces", "hitea", "fod", "draifie", "okie", "omiek", "oupa", "fosotat",
    "vieci", "rulaid", "chie", "cibi", "pou", "difait", "riwouk", "spo", "dousou", "speafai",
    "zok", "banai", "tiejo", "mou", "lud", "rirt", "poond", "geng", "greak", "degail",
    "kaipaid", "mest", "piedu", "dort", "coot", "zondro", "cheabai", "uhea", "noosti", "heal",
    "wied", "chooka", "veadoo", "nipie", "part", "tra", "degrie", "zitiert", "gast", "stide",
    "oud", "bied", "tadroo", "tiefos", "shieng", "orea", "aikkie", "jousti", "jartga", "vund",
    "goude", "diegu", "lijund", "veskuck", "te", "criep", "pies", "painu", "eapeang", "joolko",
    "peanier", "bu", "lirrom", "juck", "wiere", "woudrum", "wielvik", "migai", "moovi", "ezun",
    "custu", "fintrai", "toul", "dagaim", "kijoun", "baick", "aisiepo", "tegai", "fogriem", "ciespie",
    "roop", "dracil", "orjiert", "routrou", "sea", "lai", "zourung", "flora", "burt", "pouk",
    "pu", "cre", "josek", "drean", "shoo", "lawo", "ood", "wienut", "bairi", "iecu",
    "giebien", "hatre", "ship", "loul", "preapoo", "jiek", "rapou", "zeshu", "houthai", "mood",
    "laiso", "doo", "mofa", "cospu", "jeam", "pruk", "saik", "getrot", "ajert", "jozaind",
    "maipea", "liesour", "kikou", "ci", "jend", "leack", "ed", "vouck", "doocoo", "teno",
    "iert", "goolu", "coopre", "toobou", "wotel", "ciezood", "hend", "liesea", "ustidu", "mootrom",
    "ruvo", "huveat", "belai", "volurt", "keneas", "nodwi", "veada", "gooshie", "dorwos", "slouk",
    "geavea", "cewea", "jourt", "tik", "bet", "griecra", "iest", "raihea", "waruck", "gu",
    "noovi", "koung", "waitu", "oul", "titru", "iececk", "pan", "ratea", "crenu", "fie",
    "ste", "skarai", "ejo", "aije", "lishean", "miem", "cru", "goopu", "ung", "sie",
    "sack", "preshoo", "prang", "pror", "sul", "oot", "jegai", "gubol", "nippoot", "vai",
    "sispad", "geatcu", "boun", "ubu", "siel", "sput", "vushout", "prairo", "gouci", "ga",
    "vaine", "crem", "boshe", "zohong", "hong", "groo", "weack", "gichast", "lowied", "spapok",
    "nustjai", "cha", "madun", "kotstoo", "stu", "zoust", "oovos", "dieng", "shie", "fluck",
    "zehou", "ira", "ziet", "vo", "deal", "orurt", "anzoo", "dem", "osou", "toop",
    "drosaik", "ji", "waslak", "zaifou", "keache", "kiestes", "siert", "kin", "pieku", "va",
    "douning", "adur", "peasa", "dooju", "zitro", "rundwa", "pizepou", "lick", "soodru", "kook",
    "ouck", "shease", "iece", "cid", "chai", "meaciwu", "sozail", "ploupom", "motung", "moong",
    "mie", "poothoo", "rouriel", "woniep", "par", "ist", "sturt", "oong", "jiem", "kim",
    "tufik", "jeabu", "cul", "pries", "aivoud", "utie", "pre", "raing", "kos", "nevai",
    "hi", "prouck", "vist", "vaijea", "gul", "wode", "eambust", "weat", "hoopoos", "cas",
    "vijock", "tiehe", "ajoud", "keap", "ton", "pricu", "kiet", "cuzun", "grem", "woun",
    "vethil", "bor", "din", "moop", "chehaik", "dok", "prienul", "mang", "bouk", "mo",
    "seap", "luck", "tri", "hoobrea", "tolind", "eck", "gor", "zoud", "sem", "san",
    "ootou", "peardea", "vick", "bring", "pedai", "zeaca", "mousa", "cithouk", "ludni", "vust",
    "riefai", "prari", "mado", "thogoo", "ip", "cho", "dru", "faku", "hibear", "uher",
    "skal", "cod", "jukple", "fipust", "paing", "prou", "dro", "sis", "oonu", "woocai",
    "eatied", "kead", "lairrop", "hewir", "dazu", "vap", "mitu", "pestlo", "ouding", "rus",
    "ur", "ojam", "graleng", "miend", "jing", "ruba", "vieng", "fokle", "zoowea", "koohi",
    "jeski", "ivuwou", "zaidloo", "bain", "poolain", "westo", "oodprik", "loop", "ean", "coust",
    "kespea", "graiza", "joun", "bupal", "niboo", "kaigo", "spu", "diend", "zail", "vahed",
    "wineado", "teafies", "meap", "achien", "boomi", "kool", "goohoo", "skowie", "shirgil", "oondfie",
    "bebood", "sheapi", "weang", "thole", "port", "mak", "boowe", "wirt", "geamge", "pievai",
    "lup", "eam", "bonoo", "bonou", "feng", "hesto", "ingpu", "utispuk", "skood", "mendbid",
    "dounoo", "saibeal", "gool", "acrod", "bait", "loosun", "zekoru", "voohoo", "pail", "hepest",
    "wewe", "flaichi", "dup", "reasju", "roo", "tha", "fies", "plou", "nailou", "meahist",
    "last", "de", "sel", "ju", "poom", "poonoot", "ulesi", "cri", "thouba", "gest",
    "weap", "da", "foutre", "groogea", "shaichu", "se", "net", "noovu", "sabai", "tiwai",
    "pri", "iesko", "feat", "pliefa", "trum", "andloo", "cigun", "voulnon", "pous", "kiekoop",
    "zuslou", "gre", "baim", "oucieng", "hiezool", "kapurt", "lail", "zang", "heslou", "lidack",
    "wodam", "vairso", "binaim", "cak", "iejair", "crumul", "find", "ploorul", "jahai", "do",
    "esirt", "zaing", "kuchouk", "lien", "sam", "bourt", "skoudlu", "denedo", "ced", "ustocea",
    "bri", "shoudso", "gropha", "zair", "ple", "murort", "plieroo", "dri", "ritjea", "oostsea",
    "hang", "prem", "eavet", "kala", "roodoul", "nouso", "venwou", "tielai", "moufait", "seck",
    "oho", "ocea", "culi", "griefot", "flust", "oploor", "uja", "doovie", "uririer", "jeat",
    "bizind", "gaidou", "haidoud", "siespok", "nous", "hooceak", "uham", "couga", "oozea", "ienou",
    "wazeng", "nem", "soto", "toogouk", "est", "vufu", "aid", "druwond", "kufea", "fleap",
    "hoolfai", "rounour", "mook", "houstir", "vasoocu", "heke", "geawai", "zuk", "inke", "vookear",
    "ceajack", "fechu", "bin", "skutea", "crong", "gradain", "feawik", "win", "pout", "jultrie",
    "vostin", "naiveng", "bethaid", "rodeck", "fu", "zotai", "boung", "ooto", "crai", "bing",
    "laing", "udieng", "zaivel", "leart", "mal", "zairt", "calam", "troufou", "not", "kirtzo",
    "tagrang", "nugra", "oom", "hicret", "sheada", "ro", "ko", "jem", "dut", "cist",
    "liest", "plouk", "neasa", "ploop", "sort", "voumoo", "paind", "ochop", "sham", "zart",
    "plugie", "ot", "plist", "bingmi", "gaivo", "sukmu", "heafong", "wir", "hiet", "biet",
    "oubro", "teart", "liem", "nop", "beang", "pe", "boo", "gak", "dier", "chail",
    "vack", "bi", "co", "plel", "checu", "trong", "sond", "piest", "ouvi", "kougra",
    "wotoo", "ufu", "pazeart", "muflist", "hiebro", "paisem", "chat", "houl", "gaknu", "ircie",
    "forsa", "toho", "tiegro", "cied", "rawim", "kawouga", "coul", "kangki", "thoo", "hufaind",
    "boor", "roplart", "odais", "koding", "slievu", "gir", "proock", "upchie", "peli", "themies",
    "mour", "urai", "kour", "slous", "poujak", "denvea", "eap", "bekoud", "great", "rai",
    "dik", "reawit", "geapi", "wort", "houck", "dand", "jaice", "rier", "roogip", "koddie",
    "sheazoo", "cabe", "pend", "hais", "don", "skilait", "jopea", "facai", "doorbo", "eapro",
    "gieslin", "mefet", "ooli", "nouboot", "foolu", "utist", "prom", "jeflad", "sooza", "ongro",
    "zedcroo", "airttu", "sorak", "himeast", "fourt", "keak", "mofeng", "deapaim", "mookiel", "jagai",
    "chu", "kiro", "skai", "jirlea", "idip", "flaihie", "fla", "kedi", "beap", "ebra",
    "tack", "hutci", "mukuk", "waick", "zut", "di", "gooti", "vondsie", "eahourt", "ootu",
    "tebrool", "gocruck", "ried", "ceal", "lobai", "numvea", "gaip", "poozer", "ciezes", "eplu",
    "nearzok", "spapie", "oond", "flosou", "so", "zano", "hietze", "ang", "lealo", "dakcus",
    "gort", "trierou", "bip", "greap", "jeng", "spouvea", "hail", "caick", "lan", "soot",
    "zufest", "webo", "thist", "vud", "jest", "bieha", "loudul", "drolad", "zeamim", "durek",
    "loor", "joo", "peluvea", "jis", "woust", "poucai", "slup", "kek", "judrop", "kofoo",
    "jaihair", "tai", "fleng", "treat", "preck", "jougand", "firel", "mietung", "kaibrai", "esoud",
    "didrong", "rataik", "cout", "bo", "mocknid", "hoo", "outhirt", "oufie", "coojie", "skacru",
    "ja", "thut", "agraik", "prirt", "chipoun", "seare", "ciep", "toupdan", "lietro", "flicout",
    "linim", "triekou", "jaid", "nes", "vail", "aco", "loufle", "brecou", "rocain", "walak",
    "ceadur", "chad", "pleapze", "feal", "jie", "ousdou", "kuwap", "leska", "doun", "wairt",
    "fiest", "nifadai", "rathart", "robirmo", "oontrik", "foot", "dehea", "diedea", "foumim", "tedce",
    "tiego", "vand", "aip", "truck", "ciek", "gimenom", "wup", "roong", "beack", "ok",
    "cotick", "bilaik", "doud", "ocick", "purt", "nibro", "cait", "bit", "zaispai", "wadoo",
    "kung", "kiel", "thail", "woopma", "kous", "hoube", "vuck", "ick", "cheak", "jujoon",
    "fle", "zun", "takai", "ban", "hout", "thurt", "nisor", "unjoo", "hisa", "poti",
    "gound", "bek", "vaibi", "es", "kihe", "rariem", "tem", "jocaid", "woond", "ool",
    "odpoock", "gang", "wep", "feavup", "git", "kasai", "dubron", "jivas", "poun", "flamea",
    "copbain", "zuzai", "tos", "trari", "ceata", "tiedi", "rawu", "weatou", "kiehind", "bro",
    "hini", "pripoor", "pratrap", "cudjait", "deat", "goung", "grigou", "ceploo", "gel", "ievai",
    "iplit", "crou", "huplu", "giwet", "nocrok", "aspe", "tongta", "sting", "hook", "ciend",
    "mel", "liemus", "piefurt", "banoo", "vaing", "fland", "zaithad", "fleck", "raifouk", "soucu",
    "tud", "loothu", "fietun", "jum", "bediem", "hudri", "bezoom", "dong", "skuk", "doukoo",
    "gelou", "flazoum", "aist", "vart", "tonand", "ievi", "stuvea", "horoop", "naifi", "vodfool",
    "ziliert", "drond", "eak", "dourt", "grupies", "skoud", "wima", "seal", "nean", "wunou",
    "crel", "lol", "reang", "cip", "vooti", "droo", "praistu", "wiend", "on", "skupa",
    "prud", "hospust", "siekour", "kimo", "jourirt", "tom", "emeatou", "loo", "prouhie", "bairong",
    "ska", "lienie", "ra", "iedroop", "restie", "foojoul", "wop", "ichieng", "coostu", "giep",
    "trea", "dagroom", "thoort", "joomo", "crevea", "nek", "hazu", "piewoo", "fasi", "um",
    "slaid", "seatet", "eacai", "droumo", "gozou", "fiwoum", "mefu", "sucano", "rigok", "toust",
    "rort", "stai", "thil", "zock", "oock", "fougem", "skiet", "daifles", "trabai", "raidad",
    "zul", "ainho", "fairt", "priel", "diekup", "somea", "broula", "slokcai", "koolies", "gestind",
    "sout", "iechai", "nelfie", "wal", "fep", "cigai", "caing", "taip", "rost", "sili",
    "noot", "lil", "leasoo", "mease", "skaijai", "hoogea", "deroo", "sisond", "hied", "chind",
    "ding", "wawai", "zek", "crain", "coo", "eapi", "ek", "grong", "flip", "plosten",
    "biendra", "east", "ega", "slust", "eacrea", "stoock", "taitai", "moufoom", "dris", "fidrai",
    "oungchi", "feack", "gecea", "miefoud", "enghai", "kieckso", "triepai", "soos", "eas", "mavieng",
    "kusa", "trozie", "vup", "moobal", "skem", "pastthe", "reart", "pear", "iezai", "neak",
    "ler", "saiki", "liewa", "bouci", "cuzouk", "fefie", "doum", "enoo", "earvo", "jida",
};

}  // namespace nle::corpus
