"""
Модуль конфігурації системи.

Цей модуль визначає параметри синтетичного світу, моделі, навчання,
оцінювання та шляхів до файлів. Конфігурацію можна задати JSON-файлом
(--config) і перевизначити окремими аргументами командного рядка.
Повна розв'язана конфігурація серіалізується в кожен звіт.
"""

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from core.errors import ConfigError, DataError
from core.records import NodeKind
from featurizer.layout import DEFAULT_LAYOUT


COMMANDS: Tuple[str, ...] = ("generate", "train", "eval", "ablate", "sweep", "gradcheck")
BASE_VARIANTS: Tuple[str, ...] = ("full", "no-rnn", "no-attention", "no-gcn")
SWEEP_AXES: Tuple[str, ...] = ("window-length", "history-length")
SCORERS: Tuple[str, ...] = ("model", "oracle", "random", "followers")


@dataclass
class WorldConfig:
    """
    Параметри синтетичного світу інфлюенсерів.

    Атрибути:
        n_influencers: Кількість інфлюенсерів
        n_hashtags: Розмір словника хештегів
        n_objects: Розмір словника об'єктів зображень
        n_other_users: Кількість інших користувачів, яких можна згадати
        n_windows: Кількість часових вікон
        posts_per_window: Середнє Пуассона кількості публікацій за вікно
        rho: Коефіцієнт дрейфу латентної якості AR(1)
        noise: Масштаб логнормального шуму вподобань
        trending_boost: Прибавка до якості за трендову сутність
        n_topics: Кількість тематичних сумішей сутностей
        n_trending: Розмір множини трендових сутностей вікна
        engagement_scale: Множник, що переводить сигмоїду якості у залученість
        window_seconds: Тривалість одного вікна в секундах
        seed: Зерно генератора
    """
    n_influencers: int = 200
    n_hashtags: int = 300
    n_objects: int = 80
    n_other_users: int = 150
    n_windows: int = 8
    posts_per_window: float = 4.0
    rho: float = 0.9
    noise: float = 0.3
    trending_boost: float = 1.0
    n_topics: int = 8
    n_trending: int = 12
    engagement_scale: float = 0.15
    window_seconds: float = 2592000.0
    seed: int = 0

    @property
    def is_static(self) -> bool:
        """Світ без динаміки: якість заморожена (rho = 1) і шум вимкнено."""
        return self.rho == 1.0 and self.noise == 0.0


@dataclass
class ModelConfig:
    """
    Розмірності та регуляризація моделі.

    Атрибути:
        d_embed: Ширина вхідної проєкції ознак
        gcn_layers: Кількість шарів GCN
        gcn_hidden: Ширина кожного шару GCN
        gru_hidden: Ширина стану GRU
        mlp_hidden: Ширина прихованого шару оцінювача
        dropout: Ймовірність відкидання в режимі навчання
        seed: Зерно ініціалізації ваг
    """
    d_embed: int = 128
    gcn_layers: int = 2
    gcn_hidden: int = 128
    gru_hidden: int = 128
    mlp_hidden: int = 128
    dropout: float = 0.5
    seed: int = 0


@dataclass
class TrainConfig:
    """
    Параметри навчання.

    Атрибути:
        list_size: Кількість інфлюенсерів у списку m
        lists_per_batch: Кількість списків у пакеті
        lr: Швидкість навчання Adam
        epochs: Кількість епох (по одному пакету на епоху)
        window_length: Довжина вхідної історії k
        target_offset: Зсув цільового вікна після останнього вхідного
        validation_fraction: Частка інфлюенсерів для валідації
        min_freq: Поріг нормованої частоти ребра при проріджуванні
        checkpoint_every: Період проміжних контрольних точок (0 вимикає)
        seed: Зерно вибірки списків, відкидання та поділу
    """
    list_size: int = 10
    lists_per_batch: int = 32
    lr: float = 0.001
    epochs: int = 150
    window_length: int = 6
    target_offset: int = 1
    validation_fraction: float = 0.2
    min_freq: float = 0.01
    checkpoint_every: int = 0
    seed: int = 0


@dataclass
class PathsConfig:
    """
    Шляхи до даних, контрольної точки та звітів.

    Якщо checkpoint або report_dir не задано, вони розміщуються в out_dir.
    """
    data_dir: str = "data"
    out_dir: str = "runs"
    checkpoint: Optional[str] = None
    report_dir: Optional[str] = None

    @property
    def checkpoint_path(self) -> Path:
        return Path(self.checkpoint) if self.checkpoint else Path(self.out_dir) / "model.ckpt"

    @property
    def report_path(self) -> Path:
        return Path(self.report_dir) if self.report_dir else Path(self.out_dir)


@dataclass
class EvalConfig:
    """
    Параметри оцінювання.

    Атрибути:
        ks: Відсічки NDCG@K
        rbp_p: Параметр наполегливості RBP
        scorer: Джерело оцінок (model, oracle, random, followers)
        stratum_size: Розмір випадкової підвибірки кожної страти (0 - усі)
        stratum_repeats: Кількість повторів підвибірки страт
        repeats: Кількість повторів з послідовними зернами
    """
    ks: Tuple[int, ...] = (1, 10, 50, 100, 200)
    rbp_p: float = 0.95
    scorer: str = "model"
    stratum_size: int = 0
    stratum_repeats: int = 10
    repeats: int = 1


@dataclass
class SweepConfig:
    axis: str = "history-length"
    window_factors: Tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 3.0)
    workers: int = 1


@dataclass
class RunConfig:
    """
    Повна конфігурація однієї команди.

    Атрибути:
        command: Підкоманда (generate, train, eval, ablate, sweep, gradcheck)
        seed: Спільне зерно запуску
        variant: Варіант моделі або абляції
        corrupt_gradient: Назва параметра для ін'єкції помилки градієнта
        verbose: Прапорець детального виведення
    """
    command: str = "train"
    seed: int = 0
    world: WorldConfig = field(default_factory=WorldConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    paths: PathsConfig = field(default_factory=PathsConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    variant: str = "full"
    corrupt_gradient: Optional[str] = None
    verbose: bool = False

    def with_seed(self, seed: int) -> "RunConfig":
        """Повертає копію конфігурації з однаковим зерном для всіх розділів."""
        cfg = config_from_dict(config_to_dict(self))
        set_seed(cfg, seed)
        return cfg


SECTIONS = ("world", "model", "train", "paths", "eval", "sweep")
TOP_LEVEL = ("command", "seed", "variant", "corrupt_gradient", "verbose")


def set_seed(cfg: RunConfig, seed: int):
    cfg.seed = seed
    cfg.world.seed = seed
    cfg.model.seed = seed
    cfg.train.seed = seed


def config_to_dict(cfg: RunConfig) -> Dict[str, Any]:
    """Серіалізовний словник повної конфігурації (кортежі стають списками)."""
    return json.loads(json.dumps(asdict(cfg)))


def _section_from_dict(cls, data: Dict[str, Any], name: str):
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"Невідомі ключі в розділі {name}: {', '.join(unknown)}")
    values = {}
    for key, value in data.items():
        default = getattr(cls(), key)
        values[key] = tuple(value) if isinstance(default, tuple) else value
    return cls(**values)


def config_from_dict(data: Dict[str, Any], base: Optional[RunConfig] = None) -> RunConfig:
    """
    Відновлює конфігурацію зі словника, накладаючи значення на base.

    Raises:
        ConfigError: Якщо словник містить невідомі розділи або ключі
    """
    cfg = base if base is not None else RunConfig()
    unknown = sorted(set(data) - set(SECTIONS) - set(TOP_LEVEL))
    if unknown:
        raise ConfigError(f"Невідомі ключі конфігурації: {', '.join(unknown)}")
    for name in SECTIONS:
        if name in data:
            merged = {**asdict(getattr(cfg, name)), **data[name]}
            setattr(cfg, name, _section_from_dict(type(getattr(cfg, name)), merged, name))
    for name in TOP_LEVEL:
        if name in data:
            setattr(cfg, name, data[name])
    if "seed" in data:
        set_seed(cfg, int(data["seed"]))
        for name in ("world", "model", "train"):
            if "seed" in data.get(name, {}):
                getattr(cfg, name).seed = int(data[name]["seed"])
    return cfg


def load_config_file(path: str, base: Optional[RunConfig] = None) -> RunConfig:
    """
    Завантажує конфігурацію з JSON-файлу.

    Raises:
        DataError: Якщо файл відсутній або недоступний
        ConfigError: Якщо файл не є коректним JSON-об'єктом
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"Не вдалося прочитати файл конфігурації {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Файл конфігурації {path} не є коректним JSON: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Файл конфігурації {path} має містити JSON-об'єкт")
    return config_from_dict(data, base)


def _to_int(flag: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"Некоректне значення для {flag}: {value}")


def _to_float(flag: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"Некоректне значення для {flag}: {value}")


def _set_hidden(cfg: RunConfig, value: int):
    model = cfg.model
    model.d_embed = model.gcn_hidden = model.gru_hidden = model.mlp_hidden = value


def _set_seed(cfg: RunConfig, value: int):
    set_seed(cfg, value)


Setter = Callable[[RunConfig, Any], None]


def _field(section: Optional[str], name: str) -> Setter:
    def setter(cfg: RunConfig, value):
        setattr(getattr(cfg, section) if section else cfg, name, value)
    return setter


# прапорець -> (перетворення значення, запис у конфігурацію)
FLAGS: Dict[str, Tuple[Callable[[str, str], Any], Setter]] = {
    '--seed': (_to_int, _set_seed),
    '--out-dir': (lambda flag, v: v, _field("paths", "out_dir")),
    '--data-dir': (lambda flag, v: v, _field("paths", "data_dir")),
    '--checkpoint': (lambda flag, v: v, _field("paths", "checkpoint")),
    '--report-dir': (lambda flag, v: v, _field("paths", "report_dir")),
    '--gcn-layers': (_to_int, _field("model", "gcn_layers")),
    '--hidden-dim': (_to_int, _set_hidden),
    '--dropout': (_to_float, _field("model", "dropout")),
    '--list-size': (_to_int, _field("train", "list_size")),
    '--lists-per-batch': (_to_int, _field("train", "lists_per_batch")),
    '--lr': (_to_float, _field("train", "lr")),
    '--epochs': (_to_int, _field("train", "epochs")),
    '--window-length': (_to_int, _field("train", "window_length")),
    '--influencers': (_to_int, _field("world", "n_influencers")),
    '--windows': (_to_int, _field("world", "n_windows")),
    '--rho': (_to_float, _field("world", "rho")),
    '--noise': (_to_float, _field("world", "noise")),
    '--trending-boost': (_to_float, _field("world", "trending_boost")),
    '--rbp-p': (_to_float, _field("eval", "rbp_p")),
    '--scorer': (lambda flag, v: v, _field("eval", "scorer")),
    '--repeats': (_to_int, _field("eval", "repeats")),
    '--axis': (lambda flag, v: v, _field("sweep", "axis")),
    '--workers': (_to_int, _field("sweep", "workers")),
    '--variant': (lambda flag, v: v, _field(None, "variant")),
    '--corrupt-gradient': (lambda flag, v: v, _field(None, "corrupt_gradient")),
}


def parse_arguments(args: List[str]) -> RunConfig:
    """
    Парсить аргументи командного рядка та створює конфігурацію запуску.

    Першим аргументом має бути підкоманда. Файл --config застосовується
    першим незалежно від позиції, після чого кожен прапорець перевизначає
    значення з файлу.

    Args:
        args: Список аргументів командного рядка (sys.argv[1:])

    Returns:
        RunConfig: Об'єкт конфігурації з параметрами запуску

    Raises:
        ConfigError: Якщо передано некоректні аргументи або значення
        DataError: Якщо файл конфігурації недоступний
    """
    if not args or args[0] in ('-h', '--help'):
        print_help()
        raise SystemExit(0)

    command = args[0]
    if command not in COMMANDS:
        raise ConfigError(
            f"Невідома підкоманда: {command}. Доступні варіанти: {', '.join(COMMANDS)}"
        )

    rest = args[1:]
    config = RunConfig(command=command)
    if '--config' in rest:
        position = rest.index('--config')
        if position + 1 >= len(rest):
            raise ConfigError("Аргумент --config потребує значення")
        config = load_config_file(rest[position + 1], config)
        config.command = command
        rest = rest[:position] + rest[position + 2:]

    i = 0
    while i < len(rest):
        arg = rest[i]

        if arg in ('-h', '--help'):
            print_help()
            raise SystemExit(0)

        elif arg == '--verbose':
            config.verbose = True
            i += 1

        elif arg in FLAGS:
            if i + 1 >= len(rest):
                raise ConfigError(f"Аргумент {arg} потребує значення")
            convert, setter = FLAGS[arg]
            setter(config, convert(arg, rest[i + 1]))
            i += 2

        else:
            raise ConfigError(f"Невідомий аргумент: {arg}. Використовуйте --help для довідки")

    return config


def parse_variant(variant: str) -> Tuple[str, Optional[str]]:
    """
    Розбирає назву варіанта абляції на базовий варіант і аргумент.

    Returns:
        Пара (вид, аргумент): ("full", None), ("drop-node-kind", "ImageObject") тощо

    Raises:
        ConfigError: Якщо назва варіанта невідома
    """
    if variant in BASE_VARIANTS:
        return variant, None
    kind, _, argument = variant.partition(":")
    if kind == "drop-node-kind":
        try:
            parsed = NodeKind.parse(argument)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if not parsed.is_auxiliary:
            raise ConfigError("Вузли інфлюенсерів не можна видаляти з мережі")
        return kind, parsed.value
    if kind == "drop-feature":
        if argument not in DEFAULT_LAYOUT.names:
            raise ConfigError(
                f"Невідома категорія ознак: {argument}. "
                f"Доступні варіанти: {', '.join(DEFAULT_LAYOUT.names)}"
            )
        return kind, argument
    available = ", ".join(BASE_VARIANTS + ("drop-node-kind:<тип>", "drop-feature:<категорія>"))
    raise ConfigError(f"Невідомий варіант: {variant}. Доступні варіанти: {available}")


def validate_config(config: RunConfig) -> None:
    """
    Перевіряє коректність параметрів конфігурації.

    Args:
        config: Конфігурація для валідації

    Raises:
        ConfigError: Якщо знайдено некоректні значення параметрів
    """
    world, model, train = config.world, config.model, config.train

    for name in ("n_influencers", "n_hashtags", "n_objects", "n_other_users",
                 "n_windows", "n_topics", "n_trending"):
        if getattr(world, name) < 1:
            raise ConfigError(f"Параметр світу {name} повинен бути не меншим за 1")
    if not 0.0 <= world.rho <= 1.0:
        raise ConfigError("Коефіцієнт дрейфу rho повинен лежати в [0, 1]")
    if world.noise < 0:
        raise ConfigError("Масштаб шуму не може бути від'ємним")
    if world.posts_per_window <= 0:
        raise ConfigError("Середня кількість публікацій повинна бути додатною")
    if world.engagement_scale <= 0 or world.window_seconds <= 0:
        raise ConfigError("Масштаб залученості та тривалість вікна повинні бути додатними")

    for name in ("d_embed", "gcn_layers", "gcn_hidden", "gru_hidden", "mlp_hidden"):
        if getattr(model, name) < 1:
            raise ConfigError(f"Розмірність {name} повинна бути не меншою за 1")
    if not 0.0 <= model.dropout < 1.0:
        raise ConfigError("Ймовірність відкидання повинна лежати в [0, 1)")

    if train.list_size < 2:
        raise ConfigError("Розмір списку повинен бути не меншим за 2")
    if train.lists_per_batch < 1:
        raise ConfigError("Кількість списків у пакеті повинна бути додатною")
    if train.lr < 0:
        raise ConfigError("Швидкість навчання не може бути від'ємною")
    if train.epochs < 0:
        raise ConfigError("Кількість епох не може бути від'ємною")
    if train.window_length < 1:
        raise ConfigError("Довжина вхідної історії повинна бути не меншою за 1")
    if train.target_offset != 1:
        raise ConfigError("Підтримується лише цільове вікно одразу після історії")
    if not 0.0 <= train.validation_fraction < 1.0:
        raise ConfigError("Частка валідації повинна лежати в [0, 1)")
    if not 0.0 <= train.min_freq <= 1.0:
        raise ConfigError("Поріг частоти ребра повинен лежати в [0, 1]")
    if train.checkpoint_every < 0:
        raise ConfigError("Період контрольних точок не може бути від'ємним")
    if world.n_windows < train.window_length + 2:
        raise ConfigError(
            f"Кількість вікон {world.n_windows} замала для історії {train.window_length}: "
            f"потрібно щонайменше {train.window_length + 2}"
        )

    if not config.eval.ks or any(k < 1 for k in config.eval.ks):
        raise ConfigError("Відсічки NDCG@K повинні бути додатними")
    if not 0.0 < config.eval.rbp_p < 1.0:
        raise ConfigError("Параметр RBP p повинен лежати в (0, 1)")
    if config.eval.scorer not in SCORERS:
        raise ConfigError(
            f"Невідоме джерело оцінок: {config.eval.scorer}. "
            f"Доступні варіанти: {', '.join(SCORERS)}"
        )
    if config.eval.repeats < 1 or config.eval.stratum_repeats < 1:
        raise ConfigError("Кількість повторів повинна бути додатною")
    if config.eval.stratum_size < 0:
        raise ConfigError("Розмір підвибірки страти не може бути від'ємним")

    if config.sweep.axis not in SWEEP_AXES:
        raise ConfigError(
            f"Невідома вісь перебору: {config.sweep.axis}. "
            f"Доступні варіанти: {', '.join(SWEEP_AXES)}"
        )
    if config.sweep.workers < 1:
        raise ConfigError("Кількість робочих потоків повинна бути додатною")
    if not config.sweep.window_factors or any(f <= 0 for f in config.sweep.window_factors):
        raise ConfigError("Множники довжини вікна повинні бути додатними")

    parse_variant(config.variant)


def print_help():
    """Виводить довідкову інформацію про використання програми."""
    help_text = """
Використання: python main.py КОМАНДА [ОПЦІЇ]

Ранжування інфлюенсерів за майбутньою залученістю аудиторії на основі
часових гетерогенних мереж.

Команди:
  generate                   Згенерувати синтетичний світ у каталог даних
  train                      Навчити модель і зберегти контрольну точку
  eval                       Оцінити ранжування на відкладеному вікні
  ablate                     Навчити та оцінити варіант моделі (--variant)
  sweep                      Перебір довжини вікна або історії (--axis)
  gradcheck                  Перевірити градієнти скінченними різницями

Загальні аргументи:
  --config FILE              JSON-файл конфігурації (прапорці мають пріоритет)
  --seed N                   Зерно запуску (за замовчуванням: 0)
  --out-dir DIR              Каталог результатів (за замовчуванням: runs)
  --data-dir DIR             Каталог даних (за замовчуванням: data)
  --checkpoint FILE          Файл контрольної точки (за замовчуванням: OUT/model.ckpt)
  --report-dir DIR           Каталог звітів (за замовчуванням: OUT)
  --verbose                  Детальний вивід інформації
  -h, --help                 Вивести цю довідку

Параметри моделі та навчання:
  --gcn-layers N             Кількість шарів GCN (за замовчуванням: 2)
  --hidden-dim N             Ширина всіх прихованих шарів (за замовчуванням: 128)
  --dropout P                Ймовірність відкидання (за замовчуванням: 0.5)
  --list-size M              Розмір списку інфлюенсерів (за замовчуванням: 10)
  --lists-per-batch N        Кількість списків у пакеті (за замовчуванням: 32)
  --lr RATE                  Швидкість навчання (за замовчуванням: 0.001)
  --epochs N                 Кількість епох (за замовчуванням: 150)
  --window-length K          Довжина вхідної історії (за замовчуванням: 6)

Параметри синтетичного світу:
  --influencers N            Кількість інфлюенсерів (за замовчуванням: 200)
  --windows W                Кількість часових вікон (за замовчуванням: 8)
  --rho R                    Коефіцієнт дрейфу якості (за замовчуванням: 0.9)
  --noise S                  Масштаб шуму вподобань (за замовчуванням: 0.3)
  --trending-boost B         Прибавка трендових сутностей (за замовчуванням: 1.0)

Параметри оцінювання та експериментів:
  --rbp-p P                  Параметр наполегливості RBP (за замовчуванням: 0.95)
  --scorer NAME              Джерело оцінок: model, oracle, random, followers
  --repeats N                Повтори з зернами seed..seed+N-1 (за замовчуванням: 1)
  --variant NAME             full, no-rnn, no-attention, no-gcn,
                             drop-node-kind:<тип>, drop-feature:<категорія>
  --axis NAME                window-length або history-length
  --workers N                Робочі потоки перебору (за замовчуванням: 1)
  --corrupt-gradient NAME    Спотворити градієнт параметра (перевірка gradcheck)

Приклади використання:
  python main.py generate --seed 7 --data-dir data
  python main.py train --data-dir data --epochs 100 --verbose
  python main.py eval --data-dir data --scorer followers
  python main.py ablate --variant drop-node-kind:ImageObject --repeats 5
  python main.py sweep --axis history-length --workers 4
  python main.py gradcheck
    """
    print(help_text)
